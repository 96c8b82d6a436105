use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Toy lane-keeping vehicle. Lateral offset is measured in lane half-widths,
/// so `|offset| > 1` is an out-of-bound episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleParams {
    /// Fraction of the perceived offset corrected per frame.
    pub steering_gain: f64,
    /// Offset drift per frame per unit road curvature.
    pub curvature_drift: f64,
    /// Road curvature is `amplitude · sin(phase)`; the phase advances by
    /// `2π / period` with the period (frames) wandering inside the bounds.
    pub curvature_amplitude: f64,
    pub curvature_period_min: f64,
    pub curvature_period_max: f64,
    pub curvature_period_step_std: f64,
    /// AR(1) coefficient of the perception error.
    pub perception_persistence: f64,
    /// Perception-error innovation std is `base + gain · load^exponent`.
    pub perception_noise_base: f64,
    pub perception_noise_gain: f64,
    pub perception_noise_exponent: f64,
    /// Time constant (frames) of the exponential average that turns the
    /// injected intensity into perceptual load.
    pub load_lag_frames: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            steering_gain: 0.25,
            curvature_drift: 0.05,
            curvature_amplitude: 0.5,
            curvature_period_min: 80.0,
            curvature_period_max: 200.0,
            curvature_period_step_std: 2.0,
            perception_persistence: 0.8,
            perception_noise_base: 0.04,
            perception_noise_gain: 0.6,
            perception_noise_exponent: 3.0,
            load_lag_frames: 25.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Pose {
    /// Road curvature in `[-1, 1]`.
    pub curvature: f64,
    /// Lateral offset in lane half-widths.
    pub offset: f64,
}

pub(crate) struct Trajectory {
    pub poses: Vec<Pose>,
    pub misbehaviour: Vec<bool>,
}

/// Integrates the vehicle over the intensity trace. An out-of-bound frame is
/// flagged and the vehicle is put back on the lane centre for the next frame.
pub(crate) fn simulate(p: &VehicleParams, intensity: &[f64], rng: &mut ChaCha8Rng) -> Trajectory {
    let mut phase = rng.random_range(0.0..std::f64::consts::TAU);
    let mut period = rng.random_range(p.curvature_period_min..=p.curvature_period_max);
    let (mut offset, mut perception_err, mut load) = (0.0f64, 0.0f64, 0.0f64);
    let alpha = 1.0 / p.load_lag_frames.max(1.0);
    let mut poses = Vec::with_capacity(intensity.len());
    let mut misbehaviour = Vec::with_capacity(intensity.len());

    for &i in intensity {
        load += alpha * (i - load);
        let sigma = p.perception_noise_base + p.perception_noise_gain * load.max(0.0).powf(p.perception_noise_exponent);
        let z_road: f64 = StandardNormal.sample(rng);
        let z_perc: f64 = StandardNormal.sample(rng);
        period = (period + p.curvature_period_step_std * z_road).clamp(p.curvature_period_min, p.curvature_period_max);
        phase = (phase + std::f64::consts::TAU / period) % std::f64::consts::TAU;
        let curvature = p.curvature_amplitude * phase.sin();
        perception_err = p.perception_persistence * perception_err + sigma * z_perc;
        offset += p.curvature_drift * curvature - p.steering_gain * (offset + perception_err);

        let out = offset.abs() > 1.0;
        poses.push(Pose { curvature, offset: offset.clamp(-1.5, 1.5) });
        misbehaviour.push(out);
        if out {
            offset = 0.0;
            perception_err = 0.0;
        }
    }
    Trajectory { poses, misbehaviour }
}
