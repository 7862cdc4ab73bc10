//! Modified Z-score on the rolling window:
//! `0.6745 (r_t - median) / MAD` against a cutoff (default 3).
//!
//! A constant window has MAD 0; the score is then +/-infinity unless `r_t`
//! equals the median (score 0), so any deviation from a flat history flags.

use super::{check_series, AnomalyError, DetectionPoint, DetectionSeries, DetectorConfig};

/// Gaussian consistency factor: `0.6745 MAD` estimates one standard
/// deviation for normal data.
pub const MAD_SCALE: f64 = 0.6745;

fn median_sorted(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

/// Modified Z-score of `value` against a reference sample.
pub fn modified_zscore(window: &[f64], value: f64) -> f64 {
    let mut sorted = window.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let med = median_sorted(&sorted);
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - med).abs()).collect();
    dev.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mad = median_sorted(&dev);
    let centered = value - med;
    if mad == 0.0 {
        if centered == 0.0 {
            0.0
        } else {
            centered.signum() * f64::INFINITY
        }
    } else {
        MAD_SCALE * centered / mad
    }
}

pub fn mad_zscore_detect(r: &[f64], cfg: &DetectorConfig) -> Result<DetectionSeries, AnomalyError> {
    cfg.validate()?;
    let w = cfg.window;
    check_series(r, w)?;
    let mut points = Vec::with_capacity(r.len().saturating_sub(w));
    for t in w..r.len() {
        let stat = modified_zscore(&r[t - w + 1..t], r[t]);
        points.push(DetectionPoint {
            index: t,
            value: r[t],
            stat,
            flagged: stat.abs() > cfg.z_threshold,
            fallback: false,
        });
    }
    Ok(DetectionSeries {
        method: cfg.method.label().to_string(),
        len: r.len(),
        window: w,
        points,
    })
}
