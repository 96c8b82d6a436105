//! Synthetic stand-in for an instrumented driving simulator: a procedural
//! road renderer, gradually injected adverse conditions and a toy
//! lane-keeping vehicle whose lane departures are the ground-truth
//! misbehaviours.

mod io;
mod render;
mod vehicle;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruct::{FrameStream, FrameTensor};
use crate::scalar::Scalar;

pub use io::{read_intensity_csv, read_misbehaviour_csv, write_intensity_csv, write_misbehaviour_csv};
pub use render::RenderParams;
pub use vehicle::VehicleParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Nominal,
    DayNightCycle,
    Rain,
    Snow,
    Fog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    pub track_seed: u64,
    pub n_frames: usize,
    pub frame_rate_hz: f64,
    /// Active conditions and their peak intensity in `[0, 1]`. Empty or
    /// `{"nominal": _}` alone means nominal driving.
    pub conditions: BTreeMap<Condition, f64>,
    pub cycle_period_s: f64,
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub vehicle: VehicleParams,
    pub render: RenderParams,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            track_seed: 0,
            n_frames: 1200,
            frame_rate_hz: 10.0,
            conditions: BTreeMap::from([(Condition::Nominal, 0.0)]),
            cycle_period_s: 60.0,
            width: 32,
            height: 32,
            channels: 1,
            vehicle: VehicleParams::default(),
            render: RenderParams::default(),
        }
    }
}

impl ScenarioSpec {
    pub fn nominal(track_seed: u64, n_frames: usize) -> Self {
        Self { track_seed, n_frames, ..Self::default() }
    }

    /// Every adverse condition at the given peak intensity.
    pub fn combined(track_seed: u64, n_frames: usize, intensity_max: f64) -> Self {
        let conditions = [Condition::DayNightCycle, Condition::Rain, Condition::Snow, Condition::Fog]
            .into_iter()
            .map(|c| (c, intensity_max))
            .collect();
        Self { track_seed, n_frames, conditions, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_frames == 0 {
            return Err(Error::InvalidConfig("n_frames must be >= 1".into()));
        }
        if !(self.frame_rate_hz > 0.0) || !(self.cycle_period_s > 0.0) {
            return Err(Error::InvalidConfig("frame_rate_hz and cycle_period_s must be positive".into()));
        }
        if self.width == 0 || self.height < 4 || !(self.channels == 1 || self.channels == 3) {
            return Err(Error::InvalidConfig(format!(
                "unsupported frame shape {}x{}x{} (need height >= 4, 1 or 3 channels)",
                self.width, self.height, self.channels
            )));
        }
        if self.conditions.contains_key(&Condition::Nominal) && self.conditions.len() > 1 {
            return Err(Error::InvalidConfig("nominal excludes every other condition".into()));
        }
        if let Some((c, v)) = self.conditions.iter().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidConfig(format!("intensity_max for {c:?} is {v}, must lie in [0, 1]")));
        }
        Ok(())
    }

    pub fn is_nominal(&self) -> bool {
        self.conditions.keys().all(|c| *c == Condition::Nominal)
    }

    /// Peak intensity across active adverse conditions.
    pub fn peak_intensity(&self) -> f64 {
        self.conditions.iter().filter(|(c, _)| **c != Condition::Nominal).map(|(_, v)| *v).fold(0.0, f64::max)
    }

    fn period_frames(&self) -> f64 {
        self.cycle_period_s * self.frame_rate_hz
    }
}

/// Raised-cosine ramp `(1 − cos(2πt/P)) / 2` in `[0, 1]`, zero at `t = 0`.
fn waveform(t_frames: usize, period_frames: f64) -> f64 {
    (1.0 - (2.0 * std::f64::consts::PI * t_frames as f64 / period_frames).cos()) / 2.0
}

/// Injected-condition intensity at frame `t`: the raised-cosine ramp scaled by
/// the peak intensity of the active conditions (zero for nominal driving).
pub fn condition_intensity(t_frames: usize, spec: &ScenarioSpec) -> f64 {
    spec.peak_intensity() * waveform(t_frames, spec.period_frames())
}

/// Per-frame ground truth: `true` where a misbehaviour was recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisbehaviourLog {
    flags: Vec<bool>,
}

impl MisbehaviourLog {
    pub fn new(flags: Vec<bool>) -> Self {
        Self { flags }
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub stream: FrameStream<T>,
    pub log: MisbehaviourLog,
    pub intensity: Vec<f64>,
}

const RENDER_STREAM: u64 = 0x5eed_f00d_0000_0001;

/// Generates frames, misbehaviour flags and the intensity trace. Fully
/// determined by `spec`, including `track_seed`.
pub fn generate_scenario<T: Scalar>(spec: &ScenarioSpec) -> Result<Scenario<T>> {
    spec.validate()?;
    let mut world_rng = ChaCha8Rng::seed_from_u64(spec.track_seed);
    let mut pixel_rng = ChaCha8Rng::seed_from_u64(spec.track_seed ^ RENDER_STREAM);
    let period = spec.period_frames();

    let intensity: Vec<f64> = (0..spec.n_frames).map(|t| condition_intensity(t, spec)).collect();
    let trajectory = vehicle::simulate(&spec.vehicle, &intensity, &mut world_rng);

    let mut frames = Vec::with_capacity(spec.n_frames);
    for (t, pose) in trajectory.poses.iter().enumerate() {
        let levels: Vec<(Condition, f64)> = spec
            .conditions
            .iter()
            .filter(|(c, _)| **c != Condition::Nominal)
            .map(|(&c, &imax)| (c, imax * waveform(t, period)))
            .collect();
        let pixels = render::render_frame(spec, &spec.render, pose, &levels, &mut pixel_rng);
        let pixels = pixels.into_iter().map(T::lit).collect();
        frames.push(FrameTensor::from_clamped(spec.width, spec.height, spec.channels, pixels)?);
    }
    Ok(Scenario {
        stream: FrameStream::new(frames, spec.frame_rate_hz)?,
        log: MisbehaviourLog::new(trajectory.misbehaviour),
        intensity,
    })
}
