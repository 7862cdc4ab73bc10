//! Detection report schema: JSON `{method, config, flags}` where each flag
//! row carries the date, the return under test, the reference statistic
//! `I_t` the decision was made against, and the decision itself.

use crate::format::sig12;
use gesnorm::anomaly::{DetectionSeries, DetectorConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub method: String,
    pub config: ReportConfig,
    pub flags: Vec<FlagRow>,
}

/// Full detector configuration echoed into the report so a run can be
/// reproduced from its artifact alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub window: usize,
    pub alpha: f64,
    pub distortion: String,
    pub z_threshold: f64,
    pub pot_threshold_quantile: f64,
    pub pot_outlier_quantile: f64,
    pub pot_empirical: bool,
    pub trees: usize,
    pub subsample: Option<usize>,
    pub score_threshold: f64,
    pub seed: u64,
    pub log_returns: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagRow {
    pub date: String,
    pub value: f64,
    #[serde(rename = "I_t")]
    pub i_t: f64,
    pub flagged: bool,
}

pub fn build_report(
    det: &DetectionSeries,
    dates: &[String],
    cfg: &DetectorConfig,
    distortion_spec: &str,
    log_returns: bool,
) -> Report {
    Report {
        method: det.method.clone(),
        config: ReportConfig {
            window: cfg.window,
            alpha: cfg.alpha,
            distortion: distortion_spec.to_string(),
            z_threshold: cfg.z_threshold,
            pot_threshold_quantile: cfg.pot_threshold_quantile,
            pot_outlier_quantile: cfg.pot_outlier_quantile,
            pot_empirical: cfg.pot_empirical,
            trees: cfg.trees,
            subsample: cfg.subsample,
            score_threshold: cfg.score_threshold,
            seed: cfg.seed,
            log_returns,
        },
        flags: det
            .points
            .iter()
            .map(|p| FlagRow {
                date: dates[p.index].clone(),
                value: p.value,
                i_t: p.stat,
                flagged: p.flagged,
            })
            .collect(),
    }
}

impl Report {
    /// CSV alternative to the JSON report: one row per evaluated index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,value,I_t,flagged\n");
        for row in &self.flags {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.date,
                sig12(row.value),
                sig12(row.i_t),
                row.flagged
            ));
        }
        out
    }
}
