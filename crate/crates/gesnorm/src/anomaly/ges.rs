//! GES-norm threshold rule: `I_t` is the scaled norm of the previous `W-1`
//! returns and `r_t` is flagged iff `|r_t| > I_t`.

use super::{check_series, AnomalyError, DetectionPoint, DetectionSeries, DetectorConfig};
use crate::norm::scaled_ges_norm;

pub fn ges_detect(r: &[f64], cfg: &DetectorConfig) -> Result<DetectionSeries, AnomalyError> {
    cfg.validate()?;
    let w = cfg.window;
    check_series(r, w)?;
    let mut points = Vec::with_capacity(r.len().saturating_sub(w));
    for t in w..r.len() {
        let window = &r[t - w + 1..t];
        let stat = scaled_ges_norm(window, cfg.alpha, &cfg.distortion)?;
        points.push(DetectionPoint {
            index: t,
            value: r[t],
            stat,
            flagged: r[t].abs() > stat,
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
