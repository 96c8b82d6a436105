use std::io::Write;

use serde::{Deserialize, Serialize};

use super::curves::{quantile_thresholds, score_episodes, sweep_curves, AlarmSource, CurvePoint, Episode};
use super::labels::{label_windows, LabellingConfig, WindowKind, WindowLabel};
use super::metrics::Metrics;
use super::score::Counts;
use crate::error::{Error, Result};
use crate::reconstruct::ErrorSeries;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    pub labelling: LabellingConfig,
    /// Explicit sweep thresholds; quantiles of the pooled series otherwise.
    pub thresholds: Option<Vec<f64>>,
    pub n_thresholds: usize,
    pub alarm_source: AlarmSource,
    /// Reaction periods for the prediction-horizon table.
    pub reaction_sweep: Vec<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            labelling: LabellingConfig::default(),
            thresholds: None,
            n_thresholds: 200,
            alarm_source: AlarmSource::Exceedance,
            reaction_sweep: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionSweepRow {
    pub reaction_r: usize,
    pub anomalous_windows: u64,
    pub auc_pr: Option<f64>,
    pub auc_roc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub theta: f64,
    pub counts: Counts,
    pub metrics: Metrics,
    pub anomalous_windows: u64,
    pub normal_windows: u64,
    /// Fraction of evaluated frames whose series value is `>= theta`.
    pub frame_exceedance_rate: Option<f64>,
    pub auc_roc: Option<f64>,
    pub auc_pr: Option<f64>,
    pub roc_points: Vec<CurvePoint>,
    pub pr_points: Vec<CurvePoint>,
    pub reaction_sweep: Vec<ReactionSweepRow>,
}

fn label_all<T: Scalar>(inputs: &[(&[bool], &ErrorSeries<T>)], cfg: &LabellingConfig) -> Result<Vec<Vec<WindowLabel>>> {
    inputs.iter().map(|(m, _)| label_windows(m, cfg)).collect()
}

fn episodes<'a, T: Scalar>(
    labels: &'a [Vec<WindowLabel>],
    inputs: &[(&'a [bool], &'a ErrorSeries<T>)],
) -> Vec<Episode<'a, T>> {
    labels.iter().zip(inputs).map(|(l, (_, s))| Episode { labels: l, series: s }).collect()
}

/// Labels every stream, scores alarms at `theta`, sweeps thresholds for the
/// curves and, optionally, repeats the sweep for several reaction periods.
pub fn evaluate<T: Scalar>(inputs: &[(&[bool], &ErrorSeries<T>)], theta: T, opts: &EvalOptions) -> Result<EvalReport> {
    let lab = &opts.labelling;
    lab.validate()?;
    for (i, (m, s)) in inputs.iter().enumerate() {
        if s.start_index() + s.len() > m.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("series within {} logged frames", m.len()),
                found: format!("stream {i} series ends at frame {}", s.start_index() + s.len()),
            });
        }
    }
    let labels = label_all(inputs, lab)?;
    let eps = episodes(&labels, inputs);
    let h = lab.healing_h;

    let counts = score_episodes(&eps, theta, h, opts.alarm_source)?;
    let (anomalous_windows, normal_windows) = labels.iter().flatten().fold((0, 0), |(a, n), w| match w.kind {
        WindowKind::Anomalous => (a + 1, n),
        WindowKind::Normal => (a, n + 1),
        _ => (a, n),
    });

    let frames: usize = inputs.iter().map(|(_, s)| s.len()).sum();
    let exceeding: usize = inputs.iter().map(|(_, s)| s.values().iter().filter(|&&v| v >= theta).count()).sum();
    let frame_exceedance_rate = (frames > 0).then(|| exceeding as f64 / frames as f64);

    let thetas: Vec<T> = match &opts.thresholds {
        Some(t) => t.iter().map(|&v| T::lit(v)).collect(),
        None => quantile_thresholds(&eps, opts.n_thresholds),
    };
    let curves = if thetas.is_empty() { None } else { Some(sweep_curves(&eps, &thetas, h, opts.alarm_source)?) };

    let mut reaction_sweep = Vec::with_capacity(opts.reaction_sweep.len());
    for &r in &opts.reaction_sweep {
        let cfg = LabellingConfig { reaction_r: r, ..*lab };
        let labels_r = label_all(inputs, &cfg)?;
        let eps_r = episodes(&labels_r, inputs);
        let anomalous = labels_r.iter().flatten().filter(|w| w.kind == WindowKind::Anomalous).count() as u64;
        let (auc_pr, auc_roc) = if thetas.is_empty() {
            (None, None)
        } else {
            let c = sweep_curves(&eps_r, &thetas, cfg.healing_h, opts.alarm_source)?;
            (c.auc_pr, c.auc_roc)
        };
        reaction_sweep.push(ReactionSweepRow { reaction_r: r, anomalous_windows: anomalous, auc_pr, auc_roc });
    }

    let (auc_roc, auc_pr, roc_points, pr_points) = match curves {
        Some(c) => (c.auc_roc, c.auc_pr, c.roc_points, c.pr_points),
        None => (None, None, Vec::new(), Vec::new()),
    };
    Ok(EvalReport {
        theta: theta.as_f64(),
        counts,
        metrics: Metrics::from(&counts),
        anomalous_windows,
        normal_windows,
        frame_exceedance_rate,
        auc_roc,
        auc_pr,
        roc_points,
        pr_points,
        reaction_sweep,
    })
}

/// CSV `reaction_r,anomalous_windows,auc_pr,auc_roc`; undefined areas are
/// left empty.
pub fn write_reaction_sweep_csv<W: Write>(w: W, rows: &[ReactionSweepRow]) -> Result<()> {
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["reaction_r", "anomalous_windows", "auc_pr", "auc_roc"])?;
    for row in rows {
        out.write_record([
            row.reaction_r.to_string(),
            row.anomalous_windows.to_string(),
            opt(row.auc_pr),
            opt(row.auc_roc),
        ])?;
    }
    out.flush()?;
    Ok(())
}
