//! Property tests for the norm family, its duals, and the projection LP.

use gesnorm::*;
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs() + b.abs())
}

fn vectors(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 1..max_len)
}

/// Convex, strictly increasing distortions (the norm regime).
fn convex_distortion() -> impl Strategy<Value = Distortion> {
    prop_oneof![
        Just(Distortion::identity()),
        (1.0f64..4.0).prop_map(|p| Distortion::power(p).expect("p >= 1")),
    ]
}

/// Any supported distortion, including concave ones.
fn any_distortion() -> impl Strategy<Value = Distortion> {
    prop_oneof![
        Just(Distortion::identity()),
        Just(Distortion::sqrt()),
        (0.3f64..4.0).prop_map(|p| Distortion::power(p).expect("p > 0")),
    ]
}

proptest! {
    #[test]
    fn representation_matches_minimization_oracle(
        x in vectors(20),
        alpha in 0.0f64..0.999,
        g in any_distortion(),
    ) {
        let fast = scaled_ges_norm(&x, alpha, &g).unwrap();
        let slow = scaled_ges_norm_oracle(&x, alpha, &g).unwrap();
        prop_assert!(rel_close(fast, slow, 1e-10), "{fast} vs {slow}");
    }

    #[test]
    fn homogeneity_and_definiteness(
        x in vectors(20),
        lambda in -50.0f64..50.0,
        alpha in 0.0f64..0.999,
        g in convex_distortion(),
    ) {
        let base = scaled_ges_norm(&x, alpha, &g).unwrap();
        let scaled_x: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let got = scaled_ges_norm(&scaled_x, alpha, &g).unwrap();
        prop_assert!(rel_close(got, lambda.abs() * base, 1e-12));
        if x.iter().any(|v| *v != 0.0) {
            prop_assert!(base > 0.0);
        }
        let zero = vec![0.0; x.len()];
        prop_assert_eq!(scaled_ges_norm(&zero, alpha, &g).unwrap(), 0.0);
    }

    #[test]
    fn triangle_inequality(
        pair in vectors(20).prop_flat_map(|x| {
            let n = x.len();
            (Just(x), prop::collection::vec(-100.0f64..100.0, n..=n))
        }),
        alpha in 0.0f64..0.999,
        g in convex_distortion(),
    ) {
        let (x, y) = pair;
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = scaled_ges_norm(&sum, alpha, &g).unwrap();
        let rhs = scaled_ges_norm(&x, alpha, &g).unwrap()
            + scaled_ges_norm(&y, alpha, &g).unwrap();
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn monotone_in_alpha_and_sandwiched(
        x in vectors(20),
        alphas in (0.0f64..0.999, 0.0f64..0.999),
        g in any_distortion(),
    ) {
        let (a, b) = alphas;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let at_lo = scaled_ges_norm(&x, lo, &g).unwrap();
        let at_hi = scaled_ges_norm(&x, hi, &g).unwrap();
        prop_assert!(at_lo <= at_hi + 1e-12 * (1.0 + at_hi));
        let at_zero = scaled_ges_norm(&x, 0.0, &g).unwrap();
        let max_mag = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(at_zero <= at_lo + 1e-12 * (1.0 + at_lo));
        prop_assert!(at_hi <= max_mag * (1.0 + 1e-12) + 1e-12);
        prop_assert!(rel_close(scaled_ges_norm(&x, 1.0, &g).unwrap(), max_mag, 1e-12));
    }

    #[test]
    fn nonscaled_is_rescaled(
        x in vectors(20),
        alpha in 0.0f64..0.999,
        g in any_distortion(),
    ) {
        let scaled = scaled_ges_norm(&x, alpha, &g).unwrap();
        let nonscaled = nonscaled_ges_norm(&x, alpha, &g).unwrap();
        let n = x.len() as f64;
        prop_assert!(rel_close(nonscaled, n * (1.0 - alpha) * scaled, 1e-12));
        prop_assert_eq!(nonscaled_ges_norm(&x, 1.0, &g).unwrap(), 0.0);
    }

    #[test]
    fn owl_weights_reproduce_the_norm(
        x in vectors(20),
        alpha in 0.0f64..0.999,
        g in convex_distortion(),
    ) {
        let w = ges_owl_weights(alpha, &g, x.len()).unwrap();
        let via_owl = owl_norm(&x, &w.weights).unwrap();
        let direct = scaled_ges_norm(&x, alpha, &g).unwrap();
        prop_assert!(rel_close(via_owl, direct, 1e-10), "{via_owl} vs {direct}");
    }

    #[test]
    fn holder_inequality(
        pair in vectors(16).prop_flat_map(|x| {
            let n = x.len();
            (Just(x), prop::collection::vec(-100.0f64..100.0, n..=n))
        }),
        alpha in 0.0f64..0.999,
        g in convex_distortion(),
    ) {
        let (x, y) = pair;
        let inner: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let primal = scaled_ges_norm(&x, alpha, &g).unwrap();
        let dual = ges_dual_norm(&y, alpha, &g).unwrap();
        prop_assert!(inner.abs() <= primal * dual * (1.0 + 1e-9) + 1e-9);
    }

    #[test]
    fn dual_norm_axioms(
        pair in vectors(16).prop_flat_map(|x| {
            let n = x.len();
            (Just(x), prop::collection::vec(-100.0f64..100.0, n..=n))
        }),
        lambda in -20.0f64..20.0,
        alpha in 0.0f64..0.999,
        g in convex_distortion(),
    ) {
        let (y, z) = pair;
        let base = ges_dual_norm(&y, alpha, &g).unwrap();
        let scaled_y: Vec<f64> = y.iter().map(|v| lambda * v).collect();
        prop_assert!(rel_close(
            ges_dual_norm(&scaled_y, alpha, &g).unwrap(),
            lambda.abs() * base,
            1e-12
        ));
        let sum: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + b).collect();
        let lhs = ges_dual_norm(&sum, alpha, &g).unwrap();
        let rhs = base + ges_dual_norm(&z, alpha, &g).unwrap();
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
        if y.iter().any(|v| *v != 0.0) {
            prop_assert!(base > 0.0);
        }
    }

    #[test]
    fn distortion_dual_is_involutive(p in 0.3f64..4.0, u in 0.0f64..1.0) {
        let g = Distortion::power(p).unwrap();
        let round_trip = g.dual().dual();
        prop_assert_eq!(g.eval(u), round_trip.eval(u));
        // The dual complements convexity when the pair differs from identity.
        prop_assert_eq!(g.is_convex(), round_trip.is_convex());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn projection_lp_is_consistent(
        seed in 0u64..10_000,
        n in 2usize..5,
        m in 1usize..4,
        alpha in 0.0f64..0.8,
        g in convex_distortion(),
    ) {
        let inst = {
            let mut rng = SplitMix64::new(seed);
            let a: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.next_f64()).collect())
                .collect();
            let b: Vec<f64> = (0..m).map(|_| 0.2 + rng.next_f64()).collect();
            let q: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64()).collect();
            (Polyhedron::new(a, b).unwrap(), q)
        };
        let (poly, q) = inst;
        let got = project_lp(&q, &poly, alpha, &g).unwrap();
        // The minimizer is feasible and its deviation reproduces the value.
        prop_assert!(poly.contains(&got.minimizer, 1e-7));
        let dev: Vec<f64> = q.iter().zip(&got.minimizer).map(|(a, b)| a - b).collect();
        let norm = scaled_ges_norm(&dev, alpha, &g).unwrap();
        prop_assert!(rel_close(norm, got.value, 1e-7), "{norm} vs {}", got.value);
        // No feasible point can do better than the reported optimum.
        prop_assert!(got.value <= norm + 1e-9);
    }
}
