use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use foresight_core::evalkit::{AlarmSource, LabellingConfig};
use foresight_core::reconstruct::{Activation, ReconstructorKind, TrainConfig};
use foresight_core::scenario::ScenarioSpec;
use foresight_core::ArFilterConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Whole-pipeline configuration: shared settings plus one section per
/// command. Stream names key every per-stream file inside `work_dir`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Offsets every scenario `track_seed` and seeds training.
    pub seed: u64,
    pub paths: Paths,
    pub smoothing: Smoothing,
    pub simulate: SimulateSection,
    pub train: TrainSection,
    pub fit: FitSection,
    pub detect: DetectSection,
    pub label: LabellingConfig,
    pub eval: EvalSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Resolved against the config file's directory; must already exist.
    pub work_dir: PathBuf,
    pub model: String,
    pub calibration: String,
    pub report: String,
    pub roc: String,
    pub pr: String,
    pub reaction_sweep: String,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            work_dir: PathBuf::from("."),
            model: "model.json".into(),
            calibration: "calibration.json".into(),
            report: "report.json".into(),
            roc: "roc.csv".into(),
            pr: "pr.csv".into(),
            reaction_sweep: "reaction_sweep.csv".into(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Smoothing {
    pub ar: ArFilterConfig,
    /// Fit, detect and evaluate on raw errors instead of smoothed ones.
    pub use_raw: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub scenarios: BTreeMap<String, ScenarioSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub streams: Vec<String>,
    pub kind: ReconstructorKind,
    pub hidden_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub history_k: usize,
    pub activation: Activation,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            streams: Vec::new(),
            kind: ReconstructorKind::Sae,
            hidden_sizes: d.hidden_sizes,
            learning_rate: d.learning_rate,
            epochs: d.epochs,
            batch_size: d.batch_size,
            history_k: d.history_k,
            activation: d.activation,
        }
    }
}

impl TrainSection {
    pub fn hyper(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            hidden_sizes: self.hidden_sizes.clone(),
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
            history_k: self.history_k,
            activation: self.activation,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    pub streams: Vec<String>,
    pub epsilon: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        Self { streams: Vec::new(), epsilon: 0.05 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectSection {
    pub streams: Vec<String>,
    /// Alarm cooldown; the labelling healing period when absent.
    pub healing_h: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub streams: Vec<String>,
    pub n_thresholds: usize,
    pub thresholds: Option<Vec<f64>>,
    pub alarm_source: AlarmSource,
    pub reaction_sweep: Vec<usize>,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            streams: Vec::new(),
            n_thresholds: 200,
            thresholds: None,
            alarm_source: AlarmSource::Exceedance,
            reaction_sweep: vec![10, 30, 50, 70],
        }
    }
}

/// Command-line values that win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub ar_k: Option<usize>,
    /// First entry becomes the reaction period; the list becomes the sweep.
    pub reaction_r: Option<Vec<usize>>,
    pub thresholds: Option<Vec<f64>>,
}

impl PipelineConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if cfg.paths.work_dir.is_relative() {
            cfg.paths.work_dir = base.join(&cfg.paths.work_dir);
        }
        cfg.apply(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) -> CliResult<()> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(eps) = o.epsilon {
            self.fit.epsilon = eps;
        }
        if let Some(k) = o.ar_k {
            self.smoothing.ar =
                ArFilterConfig::moving_average(k).map_err(|e| CliError::Usage(format!("--ar-k: {e}")))?;
        }
        if let Some(rs) = &o.reaction_r {
            let first = *rs.first().ok_or_else(|| CliError::Usage("--reaction-r needs at least one value".into()))?;
            self.label.reaction_r = first;
            self.eval.reaction_sweep = rs.clone();
        }
        if let Some(t) = &o.thresholds {
            self.eval.thresholds = Some(t.clone());
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(format!("invalid config: {m}")));
        if !(self.fit.epsilon > 0.0 && self.fit.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.fit.epsilon));
        }
        if let Err(e) = self.smoothing.ar.validate() {
            return bad(e.to_string());
        }
        if let Err(e) = self.label.validate() {
            return bad(e.to_string());
        }
        if self.detect.healing_h == Some(0) {
            return bad("detect.healing_h must be >= 1".into());
        }
        if self.eval.reaction_sweep.contains(&0) {
            return bad("reaction periods must be >= 1".into());
        }
        if let Some(t) = &self.eval.thresholds {
            if t.is_empty() || t.iter().any(|v| !v.is_finite()) {
                return bad("thresholds must be a non-empty list of finite numbers".into());
            }
        }
        for (name, spec) in &self.simulate.scenarios {
            if name.is_empty() || name.contains(['/', '\\']) {
                return bad(format!("scenario name {name:?} is not a plain file stem"));
            }
            if let Err(e) = spec.validate() {
                return bad(format!("scenario {name}: {e}"));
            }
        }
        Ok(())
    }

    pub fn healing_h(&self) -> usize {
        self.detect.healing_h.unwrap_or(self.label.healing_h)
    }
}
