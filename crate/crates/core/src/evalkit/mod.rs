//! Offline evaluation: window labelling around recorded misbehaviours,
//! window-level scoring of alarms, metrics and threshold sweeps.

mod curves;
mod labels;
mod metrics;
mod report;
mod score;

pub use curves::{
    quantile_thresholds, score_episodes, sweep_curves, write_pr_csv, write_roc_csv, AlarmSource, CurvePoint, Curves,
    Episode,
};
pub use labels::{label_windows, read_labels, write_labels, LabellingConfig, WindowKind, WindowLabel};
pub use metrics::{compute_metrics, Metrics};
pub use report::{evaluate, write_reaction_sweep_csv, EvalOptions, EvalReport, ReactionSweepRow};
pub use score::{score_windows, Counts};
