//! Ordered weighted L1 (OWL) norms and duality.
//!
//! `Omega_w(x) = sum_i w_i |x|_(i)` for nondecreasing nonnegative weights
//! `w` (ascending magnitudes). Its dual norm has the closed form
//! `max_i tau_i * sum_{k>=i} |y|_(k)` with `tau_i = 1 / sum_{k>=i} w_k`.
//!
//! A scaled GES norm at level `alpha` built from a convex distortion is an
//! OWL norm; [`ges_owl_weights`] produces those weights and
//! [`ges_dual_norm`] evaluates the resulting dual directly from `g`.
//! [`dual_via_lp_oracle`] computes the dual definition
//! `sup { x . y : Omega_w(x) <= 1 }` as an LP and exists to cross-check the
//! closed forms.

use crate::distortion::Distortion;
use crate::norm::{NormError, NormWeights};
use crate::simplex::{lp_solve, LpProblem, LpSolution};
use std::cmp::Ordering;

/// Validated OWL weights with precomputed dual coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OwlWeights {
    w: Vec<f64>,
    /// tau[i] = 1 / (w_{i+1} + ... + w_n), 0-indexed.
    tau: Vec<f64>,
}

impl OwlWeights {
    /// Requires nonnegative, nondecreasing `w` with a positive sum. Tiny
    /// negative slack (1e-12) from float cancellation is tolerated.
    pub fn new(w: Vec<f64>) -> Result<Self, NormError> {
        if w.is_empty() {
            return Err(NormError::InvalidOwlWeights("weights are empty".into()));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(NormError::InvalidOwlWeights("weights must be finite".into()));
        }
        if w.iter().any(|&v| v < -1e-12) {
            return Err(NormError::InvalidOwlWeights(
                "weights must be nonnegative".into(),
            ));
        }
        for pair in w.windows(2) {
            if pair[1] < pair[0] - 1e-12 {
                return Err(NormError::InvalidOwlWeights(
                    "weights must be nondecreasing".into(),
                ));
            }
        }
        if w.iter().sum::<f64>() <= 0.0 {
            return Err(NormError::InvalidOwlWeights(
                "weights must not be all zero".into(),
            ));
        }
        let n = w.len();
        let mut tau = vec![0.0; n];
        let mut suffix = 0.0;
        for i in (0..n).rev() {
            suffix += w[i];
            tau[i] = 1.0 / suffix;
        }
        Ok(OwlWeights { w, tau })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

fn sorted_magnitudes(x: &[f64]) -> Result<Vec<f64>, NormError> {
    if x.is_empty() {
        return Err(NormError::EmptyVector);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(NormError::NonFinite);
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Ok(mags)
}

fn check_len(x: &[f64], w: &OwlWeights) -> Result<(), NormError> {
    if x.len() != w.len() {
        return Err(NormError::InvalidOwlWeights(format!(
            "vector has length {} but weights have length {}",
            x.len(),
            w.len()
        )));
    }
    Ok(())
}

/// `Omega_w(x) = sum_i w_i |x|_(i)`.
pub fn owl_norm(x: &[f64], w: &OwlWeights) -> Result<f64, NormError> {
    check_len(x, w)?;
    let mags = sorted_magnitudes(x)?;
    Ok(mags.iter().zip(&w.w).map(|(m, wi)| wi * m).sum())
}

/// Dual OWL norm `max_i tau_i * sum_{k>=i} |y|_(k)`.
pub fn owl_dual(y: &[f64], w: &OwlWeights) -> Result<f64, NormError> {
    check_len(y, w)?;
    let mags = sorted_magnitudes(y)?;
    let n = mags.len();
    let mut best = 0.0_f64;
    let mut suffix = 0.0;
    for i in (0..n).rev() {
        suffix += mags[i];
        best = best.max(w.tau[i] * suffix);
    }
    Ok(best)
}

/// OWL weights realizing the scaled GES norm of a convex distortion at
/// `alpha`. For `alpha` above the top breakpoint `g((n-1)/n)` the norm is
/// the pure max norm; that case is reported through `degenerate`.
#[derive(Debug, Clone, PartialEq)]
pub struct GesOwlWeights {
    pub weights: OwlWeights,
    pub degenerate: bool,
}

pub fn ges_owl_weights(alpha: f64, g: &Distortion, n: usize) -> Result<GesOwlWeights, NormError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(NormError::AlphaOutOfRange(alpha));
    }
    if alpha == 1.0 {
        return Err(NormError::AlphaOne);
    }
    if !g.is_convex() {
        return Err(NormError::InvalidDistortion(
            "OWL weights for a GES norm require a convex distortion".into(),
        ));
    }
    let nw = NormWeights::new(g, n)?;
    let bp = &nw.breakpoints;
    let mut w = vec![0.0; n];
    if n == 1 || alpha > bp[n - 1] {
        w[n - 1] = 1.0;
        return Ok(GesOwlWeights {
            weights: OwlWeights::new(w)?,
            degenerate: n > 1 && alpha > bp[n - 1],
        });
    }
    // Interval index: largest j in [0, n-2] with bp[j] <= alpha. At interior
    // breakpoints both adjacent intervals produce the same weights.
    let j = bp[..n - 1].partition_point(|b| *b <= alpha).saturating_sub(1);
    let scale = 1.0 - alpha;
    w[j] = (bp[j + 1] - alpha) / scale;
    for i in (j + 1)..n {
        w[i] = nw.c[i] / scale;
    }
    Ok(GesOwlWeights {
        weights: OwlWeights::new(w)?,
        degenerate: false,
    })
}

/// Dual of the scaled GES norm, straight from the distortion: the maximum of
/// the L1 norm and the tail terms `(1-alpha)/(1-g((i-1)/n)) * sum_{k>=i} |y|_(k)`
/// for `i` past the interval of `alpha`.
pub fn ges_dual_norm(y: &[f64], alpha: f64, g: &Distortion) -> Result<f64, NormError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(NormError::AlphaOutOfRange(alpha));
    }
    if alpha == 1.0 {
        return Err(NormError::AlphaOne);
    }
    if !g.is_convex() {
        return Err(NormError::InvalidDistortion(
            "the closed-form dual requires a convex distortion".into(),
        ));
    }
    let mags = sorted_magnitudes(y)?;
    let n = mags.len();
    let l1: f64 = mags.iter().sum();
    let nw = NormWeights::new(g, n)?;
    let bp = &nw.breakpoints;
    if n == 1 || alpha > bp[n - 1] {
        return Ok(l1);
    }
    // Left-interval convention: smallest j with alpha <= bp[j+1]; the term
    // formulas of adjacent intervals agree at shared breakpoints.
    let j = (0..n - 1)
        .find(|&j| alpha <= bp[j + 1])
        .expect("alpha <= bp[n-1] guarantees an interval");
    let mut best = l1;
    let mut suffix = 0.0;
    for i in (j + 1..n).rev() {
        // 1-based tail start i+1: coefficient (1-alpha)/(1-g(i/n)).
        suffix += mags[i];
        let denom = 1.0 - bp[i];
        if denom <= 0.0 {
            continue;
        }
        best = best.max((1.0 - alpha) / denom * suffix);
    }
    Ok(best)
}

/// Dual norm by definition: `sup { x . y : Omega_w(x) <= 1 }` with the OWL
/// weights of `(alpha, g)`, solved as one LP. Exponential-size-free but
/// still dense; guarded to `n <= 8`. Cross-check oracle only.
pub fn dual_via_lp_oracle(y: &[f64], alpha: f64, g: &Distortion) -> Result<f64, NormError> {
    let n = y.len();
    if n > 8 {
        return Err(NormError::InvalidOwlWeights(format!(
            "LP dual oracle is limited to n <= 8, got {n}"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(NormError::NonFinite);
    }
    let w = ges_owl_weights(alpha, g, n)?.weights;

    // Omega_w(x) = sum_k d_k * TopK(|x|, k) with d_k = v_k - v_{k+1} >= 0,
    // v = reversed w. TopK enters by its epigraph: for any t >= 0 and
    // u_i >= max(|x_i| - t, 0), TopK <= k t + sum_i u_i, with equality at
    // the minimizing choice.
    let mut d = vec![0.0; n];
    for k in 0..n {
        let v_k = w.weights()[n - 1 - k];
        let v_next = if k + 1 < n { w.weights()[n - 2 - k] } else { 0.0 };
        d[k] = v_k - v_next;
    }
    let active: Vec<usize> = (0..n).filter(|&k| d[k] > 1e-14).collect();

    // Variables: x+ (n), x- (n), m (n), then per active k: t_k, u_k1..u_kn.
    let nv = 3 * n + active.len() * (n + 1);
    let idx_xp = |i: usize| i;
    let idx_xm = |i: usize| n + i;
    let idx_m = |i: usize| 2 * n + i;
    let idx_t = |a: usize| 3 * n + a * (n + 1);
    let idx_u = |a: usize, i: usize| 3 * n + a * (n + 1) + 1 + i;

    // Maximize y . x == minimize -y . (x+ - x-).
    let mut objective = vec![0.0; nv];
    for i in 0..n {
        objective[idx_xp(i)] = -y[i];
        objective[idx_xm(i)] = y[i];
    }
    let mut p = LpProblem::new(objective);
    // m_i >= |x_i|
    for i in 0..n {
        let mut row = vec![0.0; nv];
        row[idx_xp(i)] = 1.0;
        row[idx_xm(i)] = -1.0;
        row[idx_m(i)] = -1.0;
        p.add_row(row, 0.0);
        let mut row = vec![0.0; nv];
        row[idx_xp(i)] = -1.0;
        row[idx_xm(i)] = 1.0;
        row[idx_m(i)] = -1.0;
        p.add_row(row, 0.0);
    }
    // u_{k,i} >= m_i - t_k
    for (a, _) in active.iter().enumerate() {
        for i in 0..n {
            let mut row = vec![0.0; nv];
            row[idx_m(i)] = 1.0;
            row[idx_t(a)] = -1.0;
            row[idx_u(a, i)] = -1.0;
            p.add_row(row, 0.0);
        }
    }
    // Unit ball: sum_k d_k (k t_k + sum_i u_{k,i}) <= 1.
    let mut ball = vec![0.0; nv];
    for (a, &k) in active.iter().enumerate() {
        ball[idx_t(a)] = d[k] * (k + 1) as f64;
        for i in 0..n {
            ball[idx_u(a, i)] = d[k];
        }
    }
    p.add_row(ball, 1.0);

    match lp_solve(&p).map_err(|e| NormError::InvalidOwlWeights(e.to_string()))? {
        LpSolution::Optimal { value, .. } => Ok(-value),
        other => Err(NormError::InvalidOwlWeights(format!(
            "dual oracle LP ended {:?}, expected optimal",
            other.status()
        ))),
    }
}
