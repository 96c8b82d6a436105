use serde::{Deserialize, Serialize};

use super::score::Counts;

/// Ratios derived from counts; `None` where the denominator is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_metrics(tp: u64, fp: u64, tn: u64, fn_: u64) -> Metrics {
    let tpr = ratio(tp, tp + fn_);
    let fpr = ratio(fp, fp + tn);
    let precision = ratio(tp, tp + fp);
    let f1 = match (precision, tpr) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Metrics { tpr, fpr, precision, f1 }
}

impl From<&Counts> for Metrics {
    fn from(c: &Counts) -> Self {
        compute_metrics(c.tp, c.fp, c.tn, c.fn_)
    }
}
