//! Rolling-window point-anomaly detection on return series.
//!
//! Four detectors share one windowing convention: the reference window for
//! index `t` is the `W-1` returns strictly before `t` (`r[t-W+1 ..= t-1]`),
//! indices `t < W` are warm-up and never flagged, and all threshold
//! comparisons are strict. Every detector is deterministic given its config
//! and seed; the isolation forest derives one RNG stream per window from
//! `(seed, t)` so evaluation order cannot change the flags.

mod ges;
mod iforest;
mod mad;
mod pot;

pub use ges::ges_detect;
pub use iforest::{average_path_length, iforest_detect, IForestModel};
pub use mad::{mad_zscore_detect, modified_zscore};
pub use pot::{gpd_fit_mle, pot_detect, GpdFit, Tail};

use crate::distortion::Distortion;
use crate::norm::NormError;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnomalyError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("window of {window} exceeds series length {len}")]
    WindowTooLong { window: usize, len: usize },
    #[error("window {window} below the method minimum {min}")]
    WindowTooSmall { window: usize, min: usize },
    #[error("invalid detector config: {0}")]
    InvalidConfig(String),
    #[error("series contains a non-finite value at index {0}")]
    NonFiniteSeries(usize),
    #[error("{have} exceedances, need at least {need} for a GPD fit")]
    TooFewExceedances { have: usize, need: usize },
    #[error("exceedances must be positive")]
    NonPositiveExceedance,
    #[error("flag series lengths differ: {expected} vs {found}")]
    IndexMismatch { expected: usize, found: usize },
    #[error("prices must be positive (index {0})")]
    NonPositivePrice(usize),
    #[error("need at least two prices, got {0}")]
    TooFewPrices(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GesNorm,
    MadZscore,
    Pot,
    IsolationForest,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::GesNorm => "GES",
            Method::MadZscore => "Modified Z-score",
            Method::Pot => "POT",
            Method::IsolationForest => "Isolation Forest",
        }
    }
}

/// Configuration shared by all detectors; fields irrelevant to the selected
/// method are ignored by it.
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    pub method: Method,
    /// Window `W`: the reference window holds the `W-1` previous returns.
    pub window: usize,
    /// GES level.
    pub alpha: f64,
    /// GES distortion.
    pub distortion: Distortion,
    /// Modified Z-score cutoff.
    pub z_threshold: f64,
    /// POT threshold percentile `u_q` for the tail fit.
    pub pot_threshold_quantile: f64,
    /// POT outlier quantile `v`.
    pub pot_outlier_quantile: f64,
    /// Flag against the empirical window `v`-quantile instead of the
    /// GPD-implied quantile.
    pub pot_empirical: bool,
    /// Isolation-forest tree count.
    pub trees: usize,
    /// Isolation-forest subsample; `None` means `min(256, W)`, always
    /// clamped to the window size.
    pub subsample: Option<usize>,
    /// Isolation-forest score cutoff.
    pub score_threshold: f64,
    /// Seed for randomized detectors.
    pub seed: u64,
}

impl DetectorConfig {
    /// Method defaults: window 30 for GES and the modified Z-score, 180 for
    /// POT and the isolation forest; `g(u) = u^2` at level 0.95 for GES.
    pub fn new(method: Method) -> Self {
        let window = match method {
            Method::GesNorm | Method::MadZscore => 30,
            Method::Pot | Method::IsolationForest => 180,
        };
        DetectorConfig {
            method,
            window,
            alpha: 0.95,
            distortion: Distortion::power(2.0).expect("2 is a valid exponent"),
            z_threshold: 3.0,
            pot_threshold_quantile: 0.90,
            pot_outlier_quantile: 0.99,
            pot_empirical: false,
            trees: 100,
            subsample: None,
            score_threshold: 0.7,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), AnomalyError> {
        if self.window < 2 {
            return Err(AnomalyError::WindowTooSmall {
                window: self.window,
                min: 2,
            });
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(AnomalyError::InvalidConfig(format!(
                "alpha {} outside [0,1]",
                self.alpha
            )));
        }
        if !self.z_threshold.is_finite() || self.z_threshold <= 0.0 {
            return Err(AnomalyError::InvalidConfig("z_threshold must be positive".into()));
        }
        let u = self.pot_threshold_quantile;
        let v = self.pot_outlier_quantile;
        if !(0.0 < u && u < 1.0 && 0.0 < v && v < 1.0) {
            return Err(AnomalyError::InvalidConfig("quantiles must lie in (0,1)".into()));
        }
        if v <= u {
            return Err(AnomalyError::InvalidConfig(format!(
                "outlier quantile {v} must exceed threshold quantile {u}"
            )));
        }
        if !(0.0 < self.score_threshold && self.score_threshold < 1.0) {
            return Err(AnomalyError::InvalidConfig(
                "score_threshold must lie in (0,1)".into(),
            ));
        }
        if self.trees == 0 {
            return Err(AnomalyError::InvalidConfig("trees must be >= 1".into()));
        }
        let min = match self.method {
            Method::GesNorm | Method::IsolationForest => 2,
            Method::MadZscore => 3,
            // The 90th-percentile fit needs a reasonable exceedance count.
            Method::Pot => 50,
        };
        if self.window < min {
            return Err(AnomalyError::WindowTooSmall {
                window: self.window,
                min,
            });
        }
        Ok(())
    }

    /// Effective isolation-forest subsample for a window of `W-1` points.
    pub fn effective_subsample(&self) -> usize {
        self.subsample
            .unwrap_or_else(|| self.window.min(256))
            .min(self.window - 1)
            .max(1)
    }
}

/// One evaluated index `t >= W`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionPoint {
    pub index: usize,
    /// The return `r_t` under test.
    pub value: f64,
    /// The reference statistic the flag was decided on: the GES threshold
    /// `I_t`, the modified Z-score, the POT quantile for the matching tail,
    /// or the isolation score.
    pub stat: f64,
    pub flagged: bool,
    /// POT only: the window's GPD fit failed and the empirical `v`-quantile
    /// was used instead.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSeries {
    pub method: String,
    /// Length of the input series.
    pub len: usize,
    pub window: usize,
    /// Points for `t = W .. len`, in time order.
    pub points: Vec<DetectionPoint>,
}

impl DetectionSeries {
    /// Full-length flag vector; warm-up indices are `false`.
    pub fn flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.len];
        for p in &self.points {
            flags[p.index] = p.flagged;
        }
        flags
    }

    pub fn flag_count(&self) -> usize {
        self.points.iter().filter(|p| p.flagged).count()
    }
}

pub(crate) fn check_series(r: &[f64], window: usize) -> Result<(), AnomalyError> {
    if let Some(i) = r.iter().position(|v| !v.is_finite()) {
        return Err(AnomalyError::NonFiniteSeries(i));
    }
    if r.len() < window {
        return Err(AnomalyError::WindowTooLong {
            window,
            len: r.len(),
        });
    }
    Ok(())
}

/// Dispatches on `cfg.method`.
pub fn detect(r: &[f64], cfg: &DetectorConfig) -> Result<DetectionSeries, AnomalyError> {
    match cfg.method {
        Method::GesNorm => ges_detect(r, cfg),
        Method::MadZscore => mad_zscore_detect(r, cfg),
        Method::Pot => pot_detect(r, cfg),
        Method::IsolationForest => iforest_detect(r, cfg),
    }
}

/// Simple returns `p_t / p_{t-1} - 1`.
pub fn returns_from_prices(prices: &[f64]) -> Result<Vec<f64>, AnomalyError> {
    price_checks(prices)?;
    Ok(prices.windows(2).map(|w| w[1] / w[0] - 1.0).collect())
}

/// Log returns `ln(p_t / p_{t-1})`.
pub fn log_returns_from_prices(prices: &[f64]) -> Result<Vec<f64>, AnomalyError> {
    price_checks(prices)?;
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

fn price_checks(prices: &[f64]) -> Result<(), AnomalyError> {
    if prices.len() < 2 {
        return Err(AnomalyError::TooFewPrices(prices.len()));
    }
    for (i, &p) in prices.iter().enumerate() {
        if !p.is_finite() || p <= 0.0 {
            return Err(AnomalyError::NonPositivePrice(i));
        }
    }
    Ok(())
}

/// Deterministic synthetic return series: uniform noise on `[-noise, noise)`
/// with the given `(index, value)` spikes written over it.
///
/// This is the bench-scale stand-in for market data. Any spike with
/// `|value| > noise` exceeds every window maximum by construction, so
/// provided the spikes sit past the warm-up and more than a window apart,
/// a threshold detector calibrated on the window must flag all of them.
pub fn synthetic_returns(
    len: usize,
    noise: f64,
    spikes: &[(usize, f64)],
    seed: u64,
) -> Result<Vec<f64>, AnomalyError> {
    if !(noise.is_finite() && noise > 0.0) {
        return Err(AnomalyError::InvalidConfig(
            "noise bound must be positive".into(),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let mut r: Vec<f64> = (0..len)
        .map(|_| noise * (2.0 * rng.next_f64() - 1.0))
        .collect();
    for &(i, v) in spikes {
        if i >= len {
            return Err(AnomalyError::InvalidConfig(format!(
                "spike index {i} outside series of length {len}"
            )));
        }
        if !v.is_finite() {
            return Err(AnomalyError::InvalidConfig(
                "spike values must be finite".into(),
            ));
        }
        r[i] = v;
    }
    Ok(r)
}

/// Pairwise flag-overlap table. `counts[i][j]` is the number of indices
/// flagged by both method `i` and method `j`; the diagonal holds per-method
/// totals. Rendered percentages are relative to the *column* method's total.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

pub fn overlap_matrix(flag_sets: &[(String, Vec<bool>)]) -> Result<OverlapMatrix, AnomalyError> {
    if let Some((_, first)) = flag_sets.first() {
        for (_, flags) in flag_sets {
            if flags.len() != first.len() {
                return Err(AnomalyError::IndexMismatch {
                    expected: first.len(),
                    found: flags.len(),
                });
            }
        }
    }
    let k = flag_sets.len();
    let mut counts = vec![vec![0usize; k]; k];
    for i in 0..k {
        for j in 0..k {
            counts[i][j] = flag_sets[i]
                .1
                .iter()
                .zip(&flag_sets[j].1)
                .filter(|(a, b)| **a && **b)
                .count();
        }
    }
    Ok(OverlapMatrix {
        labels: flag_sets.iter().map(|(l, _)| l.clone()).collect(),
        counts,
    })
}

impl OverlapMatrix {
    /// Diagonal cells render the bare total; off-diagonal cells render
    /// `count (pp.pp%)` with the percentage taken against the column total,
    /// e.g. 58 shared of 69 column flags renders `58 (84.06%)`.
    pub fn cell(&self, i: usize, j: usize) -> String {
        if i == j {
            return self.counts[i][i].to_string();
        }
        let column_total = self.counts[j][j];
        let pct = if column_total == 0 {
            0.0
        } else {
            100.0 * self.counts[i][j] as f64 / column_total as f64
        };
        format!("{} ({:.2}%)", self.counts[i][j], pct)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for i in 0..self.labels.len() {
            out.push_str(&self.labels[i]);
            for j in 0..self.labels.len() {
                out.push(',');
                out.push_str(&self.cell(i, j));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn returns_examples() {
        let r = returns_from_prices(&[100.0, 110.0]).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.1).abs() < 1e-15);
        let constant = returns_from_prices(&[5.0; 6]).unwrap();
        assert_eq!(constant, vec![0.0; 5]);
        assert_eq!(returns_from_prices(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap().len(), 4);
        assert_eq!(
            returns_from_prices(&[100.0]),
            Err(AnomalyError::TooFewPrices(1))
        );
        assert_eq!(
            returns_from_prices(&[100.0, -1.0]),
            Err(AnomalyError::NonPositivePrice(1))
        );
        let lr = log_returns_from_prices(&[100.0, 110.0]).unwrap();
        assert!((lr[0] - 1.1f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn synthetic_series_respects_bounds_and_spikes() {
        let r = synthetic_returns(500, 0.01, &[(40, 0.5), (300, -0.5)], 7).unwrap();
        assert_eq!(r.len(), 500);
        assert_eq!(r[40], 0.5);
        assert_eq!(r[300], -0.5);
        for (i, &v) in r.iter().enumerate() {
            if i != 40 && i != 300 {
                assert!(v.abs() <= 0.01, "noise at {i} escaped the bound: {v}");
            }
        }
        // Deterministic in the seed, different across seeds.
        assert_eq!(r, synthetic_returns(500, 0.01, &[(40, 0.5), (300, -0.5)], 7).unwrap());
        assert_ne!(r, synthetic_returns(500, 0.01, &[(40, 0.5), (300, -0.5)], 8).unwrap());
        assert!(synthetic_returns(10, 0.0, &[], 1).is_err());
        assert!(synthetic_returns(10, 0.01, &[(10, 1.0)], 1).is_err());
        assert!(synthetic_returns(10, 0.01, &[(3, f64::NAN)], 1).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = DetectorConfig::new(Method::GesNorm);
        assert!(cfg.validate().is_ok());
        cfg.window = 1;
        assert!(matches!(
            cfg.validate(),
            Err(AnomalyError::WindowTooSmall { .. })
        ));
        let mut cfg = DetectorConfig::new(Method::Pot);
        cfg.window = 40;
        assert!(matches!(
            cfg.validate(),
            Err(AnomalyError::WindowTooSmall { min: 50, .. })
        ));
        let mut cfg = DetectorConfig::new(Method::Pot);
        cfg.pot_outlier_quantile = 0.5;
        assert!(cfg.validate().is_err());
        let mut cfg = DetectorConfig::new(Method::IsolationForest);
        cfg.score_threshold = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = DetectorConfig::new(Method::GesNorm);
        cfg.alpha = 1.2;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn effective_subsample_clamps() {
        let mut cfg = DetectorConfig::new(Method::IsolationForest);
        // W = 180: default min(256, W) = 180, clamped to the 179-point window.
        assert_eq!(cfg.effective_subsample(), 179);
        cfg.window = 300;
        assert_eq!(cfg.effective_subsample(), 256);
        cfg.subsample = Some(64);
        assert_eq!(cfg.effective_subsample(), 64);
        cfg.window = 10;
        assert_eq!(cfg.effective_subsample(), 9);
    }

    #[test]
    fn overlap_table_one_arithmetic() {
        // Totals 69 and 58 with full containment: the column-relative cell
        // against the 69-column is 58 (84.06%).
        let mut linear = vec![false; 200];
        let mut square = vec![false; 200];
        for i in 0..69 {
            linear[i] = true;
        }
        for i in 0..58 {
            square[i] = true;
        }
        let m = overlap_matrix(&[
            ("GES-linear".into(), linear),
            ("GES-square".into(), square),
        ])
        .unwrap();
        assert_eq!(m.counts[0][0], 69);
        assert_eq!(m.counts[1][1], 58);
        assert_eq!(m.counts[0][1], 58);
        assert_eq!(m.cell(1, 0), "58 (84.06%)");
        assert_eq!(m.cell(0, 1), "58 (100.00%)");
        assert_eq!(m.cell(0, 0), "69");
        let csv = m.to_csv();
        assert!(csv.starts_with("method,GES-linear,GES-square\n"));
        assert!(csv.contains("GES-square,58 (84.06%),58\n"));
    }

    #[test]
    fn overlap_identical_and_disjoint() {
        let a = vec![true, false, true, false];
        let b = vec![false, true, false, false];
        let m = overlap_matrix(&[("a".into(), a.clone()), ("a2".into(), a), ("b".into(), b)])
            .unwrap();
        assert_eq!(m.cell(0, 1), "2 (100.00%)");
        assert_eq!(m.cell(0, 2), "0 (0.00%)");
        assert_eq!(m.counts[2][0], 0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.counts[i][j], m.counts[j][i]);
                assert!(m.counts[i][j] <= m.counts[i][i].min(m.counts[j][j]));
            }
        }
    }

    #[test]
    fn overlap_length_mismatch() {
        let err = overlap_matrix(&[
            ("a".into(), vec![true, false]),
            ("b".into(), vec![true]),
        ])
        .unwrap_err();
        assert_eq!(
            err,
            AnomalyError::IndexMismatch {
                expected: 2,
                found: 1
            }
        );
    }
}
