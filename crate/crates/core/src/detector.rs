//! Online misbehaviour predictor: threshold comparison with a healing
//! cooldown after every alarm.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruct::ErrorSeries;
use crate::scalar::Scalar;
use crate::smoothing::{ArFilterConfig, ArSmoother};

pub const DEFAULT_HEALING_FRAMES: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig<T> {
    pub theta: T,
    /// Cooldown, in frames, started by every alarm.
    pub healing_frames_h: usize,
    pub ar: ArFilterConfig<T>,
    /// Threshold the raw errors instead of the smoothed ones (ablation).
    #[serde(default)]
    pub use_raw: bool,
}

impl<T: Scalar> DetectorConfig<T> {
    pub fn new(theta: T) -> Self {
        Self { theta, healing_frames_h: DEFAULT_HEALING_FRAMES, ar: ArFilterConfig::default(), use_raw: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > T::zero()) || !self.theta.is_finite() {
            return Err(Error::InvalidConfig(format!("theta must be positive, got {}", self.theta)));
        }
        if self.healing_frames_h == 0 {
            return Err(Error::InvalidConfig("healing_frames_h must be >= 1".into()));
        }
        self.ar.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Quiet,
    Alarm,
    Suppressed,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Quiet => "quiet",
            Decision::Alarm => "alarm",
            Decision::Suppressed => "suppressed",
        }
    }

    /// The input was at or above the threshold (alarm or suppressed).
    pub fn exceeded(self) -> bool {
        !matches!(self, Decision::Quiet)
    }
}

impl std::str::FromStr for Decision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quiet" => Ok(Decision::Quiet),
            "alarm" => Ok(Decision::Alarm),
            "suppressed" => Ok(Decision::Suppressed),
            other => Err(Error::InvalidConfig(format!("unknown decision {other:?}"))),
        }
    }
}

/// Detector state; single owner, advanced one frame at a time.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorState {
    /// Frame index of the first step.
    pub start_index: usize,
    pub frames_seen: usize,
    pub cooldown_remaining: usize,
    pub alarms: Vec<usize>,
}

impl DetectorState {
    pub fn starting_at(start_index: usize) -> Self {
        Self { start_index, ..Self::default() }
    }

    pub fn next_frame_index(&self) -> usize {
        self.start_index + self.frames_seen
    }
}

/// One detector step. Inside a cooldown the counter is decremented and no
/// alarm can fire; otherwise `error >= theta` raises an alarm and restarts
/// the cooldown at `h`.
pub fn detector_step<T: Scalar>(state: &mut DetectorState, error: T, theta: T, healing_frames_h: usize) -> Decision {
    let index = state.next_frame_index();
    state.frames_seen += 1;
    let exceeded = error >= theta;
    if state.cooldown_remaining > 0 {
        state.cooldown_remaining -= 1;
        return if exceeded { Decision::Suppressed } else { Decision::Quiet };
    }
    if exceeded {
        state.alarms.push(index);
        state.cooldown_remaining = healing_frames_h;
        Decision::Alarm
    } else {
        Decision::Quiet
    }
}

/// Per-frame decisions over an (already smoothed) series.
pub fn run_detector_decisions<T: Scalar>(
    series: &ErrorSeries<T>,
    theta: T,
    healing_frames_h: usize,
) -> (DetectorState, Vec<Decision>) {
    let mut state = DetectorState::starting_at(series.start_index());
    let decisions = series.values().iter().map(|&e| detector_step(&mut state, e, theta, healing_frames_h)).collect();
    (state, decisions)
}

/// Alarm frame indices over an (already smoothed) series.
pub fn run_detector<T: Scalar>(series: &ErrorSeries<T>, cfg: &DetectorConfig<T>) -> Vec<usize> {
    run_detector_decisions(series, cfg.theta, cfg.healing_frames_h).0.alarms
}

/// Frame indices whose error is at or above `theta`, cooldown ignored.
pub fn exceedances<T: Scalar>(series: &ErrorSeries<T>, theta: T) -> Vec<usize> {
    series.iter_indexed().filter(|&(_, e)| e >= theta).map(|(i, _)| i).collect()
}

/// Raw errors in, decisions out: smoothing and thresholding fused for online use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineDetector<T> {
    cfg: DetectorConfig<T>,
    smoother: ArSmoother<T>,
    state: DetectorState,
}

impl<T: Scalar> OnlineDetector<T> {
    pub fn new(cfg: DetectorConfig<T>, start_index: usize) -> Result<Self> {
        cfg.validate()?;
        let smoother = ArSmoother::new(cfg.ar.clone())?;
        Ok(Self { cfg, smoother, state: DetectorState::starting_at(start_index) })
    }

    /// Feeds one raw reconstruction error; returns the value compared against
    /// the threshold and the decision.
    pub fn push(&mut self, raw_error: T) -> (T, Decision) {
        let smoothed = self.smoother.push(raw_error);
        let input = if self.cfg.use_raw { raw_error } else { smoothed };
        (input, detector_step(&mut self.state, input, self.cfg.theta, self.cfg.healing_frames_h))
    }

    pub fn state(&self) -> &DetectorState {
        &self.state
    }

    pub fn alarms(&self) -> &[usize] {
        &self.state.alarms
    }
}

/// `frame_index,decision` alarm log.
pub fn write_alarm_log<W: Write>(w: W, start_index: usize, decisions: &[Decision]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["frame_index", "decision"])?;
    for (j, d) in decisions.iter().enumerate() {
        out.write_record([(start_index + j).to_string().as_str(), d.as_str()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an alarm log back into `(frame_index, decision)` pairs.
pub fn read_alarm_log<R: Read>(r: R) -> Result<Vec<(usize, Decision)>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["frame_index", "decision"] {
        return Err(Error::Format { offset: 0, message: "expected header `frame_index,decision`".into() });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let offset = rec.position().map(|p| p.byte()).unwrap_or(0);
        let idx = rec.get(0).and_then(|v| v.parse().ok());
        let dec = rec.get(1).and_then(|v| v.parse().ok());
        match (idx, dec) {
            (Some(i), Some(d)) => out.push((i, d)),
            _ => return Err(Error::Format { offset, message: "malformed alarm log row".into() }),
        }
    }
    Ok(out)
}
