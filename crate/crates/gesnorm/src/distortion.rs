//! Distortion functions: nondecreasing maps of `[0,1]` onto itself with
//! `g(0) = 0` and `g(1) = 1`. They induce the norm weights in [`crate::norm`]
//! and, through the dual map `t -> 1 - g(1 - t)`, the dual-risk view.

use crate::norm::NormError;

/// Constructible shapes plus the exact dual wrapper.
#[derive(Debug, Clone, PartialEq)]
pub enum DistortionKind {
    /// `u^p` for `p > 0`. Convex iff `p >= 1`.
    Power(f64),
    /// `u` itself; fixed point of the dual map.
    Identity,
    /// `sqrt(u)`; the canonical concave example.
    Sqrt,
    /// Piecewise-linear interpolation of `(u, g(u))` knots.
    Tabulated(Vec<(f64, f64)>),
    /// `1 - inner(1 - u)`. Keeping the inner function boxed makes the dual
    /// exact (no re-tabulation) and the double dual literally the original.
    Complement(Box<Distortion>),
}

/// A validated distortion function together with its structural flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Distortion {
    kind: DistortionKind,
    convex: bool,
    strictly_increasing: bool,
    continuous: bool,
}

/// Grid size for numeric flag verification of tabulated and dual shapes.
const FLAG_GRID: usize = 1000;
const CONVEXITY_TOL: f64 = 1e-12;

impl Distortion {
    /// `g(u) = u^p`, `p > 0`. `p = 1` normalizes to the identity.
    pub fn power(p: f64) -> Result<Self, NormError> {
        if !p.is_finite() || p <= 0.0 {
            return Err(NormError::InvalidDistortion(format!(
                "power exponent must be a positive real, got {p}"
            )));
        }
        if p == 1.0 {
            return Ok(Self::identity());
        }
        Ok(Distortion {
            kind: DistortionKind::Power(p),
            convex: p >= 1.0,
            strictly_increasing: true,
            continuous: true,
        })
    }

    pub fn identity() -> Self {
        Distortion {
            kind: DistortionKind::Identity,
            convex: true,
            strictly_increasing: true,
            continuous: true,
        }
    }

    pub fn sqrt() -> Self {
        Distortion {
            kind: DistortionKind::Sqrt,
            convex: false,
            strictly_increasing: true,
            continuous: true,
        }
    }

    /// Piecewise-linear distortion through `knots`. Requires strictly
    /// increasing abscissae from `(0, 0)` to `(1, 1)` (endpoints exact) and
    /// nondecreasing ordinates. Flags are verified numerically.
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self, NormError> {
        if knots.len() < 2 {
            return Err(NormError::InvalidDistortion(
                "tabulated distortion needs at least two knots".into(),
            ));
        }
        for &(u, v) in &knots {
            if !u.is_finite() || !v.is_finite() {
                return Err(NormError::InvalidDistortion(
                    "tabulated knots must be finite".into(),
                ));
            }
        }
        let first = knots[0];
        let last = knots[knots.len() - 1];
        if first != (0.0, 0.0) || last != (1.0, 1.0) {
            return Err(NormError::InvalidDistortion(
                "tabulated knots must run exactly from (0, 0) to (1, 1)".into(),
            ));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(NormError::InvalidDistortion(
                    "tabulated knot abscissae must be strictly increasing".into(),
                ));
            }
            if w[1].1 < w[0].1 {
                return Err(NormError::InvalidDistortion(
                    "tabulated knot values must be nondecreasing".into(),
                ));
            }
        }
        let strictly = knots.windows(2).all(|w| w[1].1 > w[0].1);
        // Piecewise-linear convexity == nondecreasing chord slopes.
        let convex = knots.windows(3).all(|w| {
            let s1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let s2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            s2 >= s1 - CONVEXITY_TOL
        });
        let d = Distortion {
            kind: DistortionKind::Tabulated(knots),
            convex,
            strictly_increasing: strictly,
            continuous: true,
        };
        d.verify_on_grid()?;
        Ok(d)
    }

    /// Evaluate `g(u)`; `u` is clamped to `[0, 1]`.
    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match &self.kind {
            DistortionKind::Power(p) => u.powf(*p),
            DistortionKind::Identity => u,
            DistortionKind::Sqrt => u.sqrt(),
            DistortionKind::Tabulated(knots) => {
                let hi = knots.partition_point(|&(x, _)| x <= u);
                if hi == knots.len() {
                    return knots[hi - 1].1;
                }
                let (u0, v0) = knots[hi - 1];
                let (u1, v1) = knots[hi];
                v0 + (v1 - v0) * (u - u0) / (u1 - u0)
            }
            DistortionKind::Complement(inner) => 1.0 - inner.eval(1.0 - u),
        }
    }

    /// Dual distortion `t -> 1 - g(1 - t)`. Exact as a function: applying
    /// `dual` twice returns the original shape. Convexity of the dual is
    /// established numerically on a grid; monotonicity and continuity carry
    /// over from `g` unchanged.
    pub fn dual(&self) -> Distortion {
        match &self.kind {
            DistortionKind::Identity => Self::identity(),
            DistortionKind::Complement(inner) => (**inner).clone(),
            _ => {
                let d = Distortion {
                    kind: DistortionKind::Complement(Box::new(self.clone())),
                    convex: false,
                    strictly_increasing: self.strictly_increasing,
                    continuous: self.continuous,
                };
                let convex = d.grid_convex();
                Distortion { convex, ..d }
            }
        }
    }

    pub fn kind(&self) -> &DistortionKind {
        &self.kind
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.strictly_increasing
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    fn grid_convex(&self) -> bool {
        (0..FLAG_GRID - 1).all(|i| {
            let a = i as f64 / FLAG_GRID as f64;
            let b = (i + 2) as f64 / FLAG_GRID as f64;
            let mid = (i + 1) as f64 / FLAG_GRID as f64;
            self.eval(mid) <= 0.5 * (self.eval(a) + self.eval(b)) + CONVEXITY_TOL
        })
    }

    fn verify_on_grid(&self) -> Result<(), NormError> {
        let mut prev = self.eval(0.0);
        if prev != 0.0 {
            return Err(NormError::InvalidDistortion("g(0) must be 0".into()));
        }
        for i in 1..=FLAG_GRID {
            let v = self.eval(i as f64 / FLAG_GRID as f64);
            if v < prev {
                return Err(NormError::InvalidDistortion(
                    "distortion must be nondecreasing".into(),
                ));
            }
            prev = v;
        }
        if prev != 1.0 {
            return Err(NormError::InvalidDistortion("g(1) must be 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_two_values() {
        let g = Distortion::power(2.0).unwrap();
        assert_eq!(g.eval(0.5), 0.25);
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(1.0), 1.0);
        assert!(g.is_convex());
        assert!(g.is_strictly_increasing());
    }

    #[test]
    fn power_one_is_identity() {
        let g = Distortion::power(1.0).unwrap();
        assert_eq!(*g.kind(), DistortionKind::Identity);
    }

    #[test]
    fn nonpositive_power_rejected() {
        assert!(Distortion::power(0.0).is_err());
        assert!(Distortion::power(-2.0).is_err());
        assert!(Distortion::power(f64::NAN).is_err());
    }

    #[test]
    fn sqrt_is_concave_not_convex() {
        let g = Distortion::sqrt();
        assert!(!g.is_convex());
        assert!(g.is_strictly_increasing());
        assert!((g.eval(0.25) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tabulated_interpolates() {
        let g = Distortion::tabulated(vec![(0.0, 0.0), (0.5, 0.1), (1.0, 1.0)]).unwrap();
        assert_eq!(g.eval(0.5), 0.1);
        assert!((g.eval(0.25) - 0.05).abs() < 1e-15);
        assert!((g.eval(0.75) - 0.55).abs() < 1e-15);
        assert!(g.is_convex());
        assert!(g.is_strictly_increasing());
    }

    #[test]
    fn tabulated_flat_segment_not_strict() {
        let g = Distortion::tabulated(vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]).unwrap();
        assert!(!g.is_strictly_increasing());
        assert!(g.is_convex());
        assert_eq!(g.eval(0.25), 0.0);
    }

    #[test]
    fn tabulated_bad_knots_rejected() {
        assert!(Distortion::tabulated(vec![(0.0, 0.0)]).is_err());
        assert!(Distortion::tabulated(vec![(0.0, 0.0), (1.0, 0.9)]).is_err());
        assert!(Distortion::tabulated(vec![(0.1, 0.0), (1.0, 1.0)]).is_err());
        assert!(Distortion::tabulated(vec![(0.0, 0.0), (0.5, 0.8), (0.5, 0.9), (1.0, 1.0)]).is_err());
        assert!(Distortion::tabulated(vec![(0.0, 0.0), (0.5, 0.8), (0.6, 0.7), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn dual_of_power_two() {
        // 1 - (1-u)^2 = 2u - u^2
        let g = Distortion::power(2.0).unwrap().dual();
        assert!((g.eval(0.5) - 0.75).abs() < 1e-15);
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(1.0), 1.0);
        assert!(!g.is_convex());
        assert!(g.is_strictly_increasing());
    }

    #[test]
    fn dual_of_identity_is_identity() {
        let g = Distortion::identity().dual();
        assert_eq!(*g.kind(), DistortionKind::Identity);
        assert!(g.is_convex());
    }

    #[test]
    fn dual_is_involution_pointwise() {
        for g in [
            Distortion::power(2.0).unwrap(),
            Distortion::sqrt(),
            Distortion::power(3.5).unwrap(),
            Distortion::tabulated(vec![(0.0, 0.0), (0.3, 0.1), (0.7, 0.4), (1.0, 1.0)]).unwrap(),
        ] {
            let gg = g.dual().dual();
            for i in 0..=100 {
                let u = i as f64 / 100.0;
                assert_eq!(gg.eval(u), g.eval(u));
            }
        }
    }

    #[test]
    fn dual_flips_convexity() {
        let convex = Distortion::power(3.0).unwrap();
        assert!(convex.is_convex());
        assert!(!convex.dual().is_convex());
        // Dual of the concave sqrt is convex.
        assert!(Distortion::sqrt().dual().is_convex());
    }
}
