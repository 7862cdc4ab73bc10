//! Peaks-over-threshold detector: per window, exceedances above the
//! empirical `u_q`-quantile get a generalized Pareto fit, and the flag
//! threshold is the GPD-implied `v`-quantile
//! `q_v = u + (beta/xi) * [((1-v)/zeta)^(-xi) - 1]`, `zeta = n_exceed/(W-1)`.
//! The left tail reuses the right-tail path on the negated series. Windows
//! whose fit is refused (fewer than 10 exceedances) fall back to the
//! empirical `v`-quantile and are marked as fallbacks.

use super::{check_series, AnomalyError, DetectionPoint, DetectionSeries, DetectorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Right,
    Left,
}

/// Fitted generalized Pareto tail. For `Tail::Left` all quantities live on
/// the negated scale.
#[derive(Debug, Clone, PartialEq)]
pub struct GpdFit {
    pub xi: f64,
    pub beta: f64,
    pub threshold: f64,
    pub n_exceed: usize,
    pub tail: Tail,
}

impl GpdFit {
    /// Distribution function of the exceedance law at `x` (same scale as
    /// `threshold`); 0 at and below the threshold.
    pub fn cdf(&self, x: f64) -> f64 {
        let z = x - self.threshold;
        if z <= 0.0 {
            return 0.0;
        }
        if self.xi == 0.0 {
            return 1.0 - (-z / self.beta).exp();
        }
        let w = 1.0 + self.xi * z / self.beta;
        if w <= 0.0 {
            // Past the upper support bound threshold - beta/xi (xi < 0).
            return 1.0;
        }
        1.0 - w.powf(-1.0 / self.xi)
    }

    /// GPD-implied quantile of the underlying variable at level `v`, given
    /// the exceedance fraction `zeta` of the window.
    pub fn quantile(&self, v: f64, zeta: f64) -> f64 {
        let ratio = zeta / (1.0 - v);
        if self.xi == 0.0 {
            self.threshold + self.beta * ratio.ln()
        } else {
            self.threshold + self.beta / self.xi * (ratio.powf(self.xi) - 1.0)
        }
    }
}

/// Negative log-likelihood of positive exceedances under GPD(xi, beta).
fn gpd_nll(x: &[f64], xi: f64, beta: f64) -> f64 {
    let n = x.len() as f64;
    if !(beta > 0.0) {
        return f64::INFINITY;
    }
    if xi.abs() < 1e-12 {
        return n * beta.ln() + x.iter().sum::<f64>() / beta;
    }
    let mut s = 0.0;
    for &v in x {
        let w = 1.0 + xi * v / beta;
        if w <= 0.0 {
            return f64::INFINITY;
        }
        s += w.ln();
    }
    n * beta.ln() + (1.0 + 1.0 / xi) * s
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
fn golden_min(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    if fc <= fd && fc <= fm {
        (c, fc)
    } else if fd <= fm {
        (d, fd)
    } else {
        (m, fm)
    }
}

/// Profiled scale: best beta (and its nll) for a fixed shape. For xi < 0 the
/// support constraint beta > -xi * max(x) bounds the search from below.
fn profile_beta(x: &[f64], xi: f64, mean: f64, maxx: f64) -> (f64, f64) {
    let lo = if xi < 0.0 {
        (-xi) * maxx * (1.0 + 1e-9)
    } else {
        mean * 1e-4
    }
    .max(1e-300);
    let hi = (maxx + mean) * 1e4;
    let (la, lb) = (lo.ln(), hi.ln());
    let cells = 25usize;
    let step = (lb - la) / cells as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..=cells {
        let v = gpd_nll(x, xi, (la + step * i as f64).exp());
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let a = la + step * best_i.saturating_sub(1) as f64;
    let b = (la + step * (best_i + 1) as f64).min(lb);
    let (lbeta, nll) = golden_min(|l| gpd_nll(x, xi, l.exp()), a, b, 40);
    (lbeta.exp(), nll)
}

/// Maximum-likelihood GPD fit to positive exceedances by a one-dimensional
/// profile likelihood over the shape, `xi` restricted to `[-0.5, 2]`.
/// Near-zero fitted shapes (`|xi| < 1e-6`) collapse to the exponential
/// limit, whose exact MLE scale is the sample mean.
pub fn gpd_fit_mle(
    exceedances: &[f64],
    threshold: f64,
    tail: Tail,
) -> Result<GpdFit, AnomalyError> {
    const MIN_EXCEEDANCES: usize = 10;
    if exceedances.len() < MIN_EXCEEDANCES {
        return Err(AnomalyError::TooFewExceedances {
            have: exceedances.len(),
            need: MIN_EXCEEDANCES,
        });
    }
    if exceedances.iter().any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(AnomalyError::NonPositiveExceedance);
    }
    let mean = exceedances.iter().sum::<f64>() / exceedances.len() as f64;
    let maxx = exceedances.iter().cloned().fold(f64::MIN, f64::max);

    let (xi_lo, xi_hi) = (-0.5, 2.0);
    let cells = 25usize;
    let step = (xi_hi - xi_lo) / cells as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..=cells {
        let (_, nll) = profile_beta(exceedances, xi_lo + step * i as f64, mean, maxx);
        if nll < best {
            best = nll;
            best_i = i;
        }
    }
    let a = (xi_lo + step * best_i as f64 - step).max(xi_lo);
    let b = (xi_lo + step * best_i as f64 + step).min(xi_hi);
    let (mut xi, _) = golden_min(
        |x| profile_beta(exceedances, x, mean, maxx).1,
        a,
        b,
        40,
    );
    let beta;
    if xi.abs() < 1e-6 {
        xi = 0.0;
        beta = mean;
    } else {
        beta = profile_beta(exceedances, xi, mean, maxx).0;
    }
    Ok(GpdFit {
        xi,
        beta,
        threshold,
        n_exceed: exceedances.len(),
        tail,
    })
}

/// Linear-interpolation (type-7) quantile of a sorted sample.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let k = sorted.len();
    let h = (k - 1) as f64 * p;
    let lo = (h.floor() as usize).min(k - 1);
    let hi = (lo + 1).min(k - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-tail flag threshold for one window (on the tail's own scale):
/// `(quantile, fallback)`.
fn tail_threshold(window: &[f64], cfg: &DetectorConfig, tail: Tail) -> (f64, bool) {
    let mut sorted = window.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let v = cfg.pot_outlier_quantile;
    if cfg.pot_empirical {
        return (quantile_sorted(&sorted, v), false);
    }
    let u = quantile_sorted(&sorted, cfg.pot_threshold_quantile);
    let exceedances: Vec<f64> = sorted.iter().filter(|&&x| x > u).map(|x| x - u).collect();
    let n_exc = exceedances.len();
    match gpd_fit_mle(&exceedances, u, tail) {
        Ok(fit) => {
            let zeta = n_exc as f64 / window.len() as f64;
            (fit.quantile(v, zeta), false)
        }
        Err(_) => (quantile_sorted(&sorted, v), true),
    }
}

pub fn pot_detect(r: &[f64], cfg: &DetectorConfig) -> Result<DetectionSeries, AnomalyError> {
    cfg.validate()?;
    let w = cfg.window;
    check_series(r, w)?;
    let mut points = Vec::with_capacity(r.len().saturating_sub(w));
    for t in w..r.len() {
        let window = &r[t - w + 1..t];
        let (q_right, fb_right) = tail_threshold(window, cfg, Tail::Right);
        let negated: Vec<f64> = window.iter().map(|v| -v).collect();
        let (q_left, fb_left) = tail_threshold(&negated, cfg, Tail::Left);
        let flagged = r[t] > q_right || -r[t] > q_left;
        let (stat, fallback) = if r[t] >= 0.0 {
            (q_right, fb_right)
        } else {
            (-q_left, fb_left)
        };
        points.push(DetectionPoint {
            index: t,
            value: r[t],
            stat,
            flagged,
            fallback,
        });
    }
    Ok(DetectionSeries {
        method: cfg.method.label().to_string(),
        len: r.len(),
        window: w,
        points,
    })
}
