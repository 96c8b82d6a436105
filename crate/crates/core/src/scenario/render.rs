use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::vehicle::Pose;
use super::{Condition, ScenarioSpec};

/// Photometric constants of the procedural camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderParams {
    pub sensor_noise_std: f64,
    /// Visible effect of a condition is `intensity^effect_exponent`.
    pub effect_exponent: f64,
    /// Fraction of rows above the horizon.
    pub horizon: f64,
    /// Brightness multiplier at full night is `1 − darkening`.
    pub darkening: f64,
    pub rain_noise_std: f64,
    pub rain_streak_density: f64,
    pub snow_flake_density: f64,
    pub snow_noise_std: f64,
    pub fog_blend: f64,
    pub fog_noise_std: f64,
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            sensor_noise_std: 0.015,
            effect_exponent: 3.0,
            horizon: 0.3,
            darkening: 0.8,
            rain_noise_std: 0.12,
            rain_streak_density: 0.5,
            snow_flake_density: 0.25,
            snow_noise_std: 0.08,
            fog_blend: 0.75,
            fog_noise_std: 0.1,
        }
    }
}

const SKY: f64 = 0.72;
const GROUND: f64 = 0.22;
const ASPHALT: f64 = 0.36;
const EDGE: f64 = 0.8;
const CENTRE: f64 = 0.95;
const FOG_GREY: f64 = 0.75;
const CHANNEL_TINT: [f64; 3] = [1.0, 0.96, 0.9];

fn bump(d: f64, width: f64) -> f64 {
    (-0.5 * (d / width).powi(2)).exp()
}

/// Clean luminance of the road scene, row-major `width × height`.
fn scene(spec: &ScenarioSpec, rp: &RenderParams, pose: &Pose) -> Vec<f64> {
    let (w, h) = (spec.width, spec.height);
    let horizon = ((h as f64 * rp.horizon).round() as usize).clamp(1, h - 1);
    let mut img = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            img[y * w + x] = if y < horizon {
                SKY - 0.1 * y as f64 / horizon as f64
            } else {
                // Depth `p` runs from ~0 at the horizon to 1 at the bottom row.
                let p = (y - horizon + 1) as f64 / (h - horizon) as f64;
                let half_road = 0.42 * w as f64 * p + 0.5;
                let centre = 0.5 * w as f64 + 0.6 * w as f64 * pose.curvature * (1.0 - p).powi(2)
                    - 0.5 * half_road * pose.offset;
                let dx = x as f64 + 0.5 - centre;
                let line_w = 0.35 + 0.5 * p;
                let base = if dx.abs() <= half_road { ASPHALT } else { GROUND };
                let edge = bump(dx.abs() - half_road, line_w);
                let mid = bump(dx, line_w);
                base.max(EDGE * edge).max(CENTRE * mid)
            };
        }
    }
    img
}

/// Smooth noise field: a coarse random grid bilinearly upsampled.
fn low_frequency_field(w: usize, h: usize, std: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    const CELLS: usize = 4;
    let normal = Normal::new(0.0, std).expect("finite std");
    let grid: Vec<f64> = (0..(CELLS + 1) * (CELLS + 1)).map(|_| normal.sample(rng)).collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let gy = y as f64 / h as f64 * CELLS as f64;
        let (y0, fy) = (gy.floor() as usize, gy.fract());
        for x in 0..w {
            let gx = x as f64 / w as f64 * CELLS as f64;
            let (x0, fx) = (gx.floor() as usize, gx.fract());
            let g = |i: usize, j: usize| grid[i * (CELLS + 1) + j];
            out[y * w + x] = (1.0 - fy) * ((1.0 - fx) * g(y0, x0) + fx * g(y0, x0 + 1))
                + fy * ((1.0 - fx) * g(y0 + 1, x0) + fx * g(y0 + 1, x0 + 1));
        }
    }
    out
}

/// Renders one frame, channel-last, values not yet clamped.
pub(crate) fn render_frame(
    spec: &ScenarioSpec,
    rp: &RenderParams,
    pose: &Pose,
    levels: &[(Condition, f64)],
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let (w, h) = (spec.width, spec.height);
    let mut img = scene(spec, rp, pose);
    let level = |c: Condition| levels.iter().find(|(k, _)| *k == c).map_or(0.0, |(_, v)| v.powf(rp.effect_exponent));

    let fog = level(Condition::Fog);
    if fog > 0.0 {
        let field = low_frequency_field(w, h, rp.fog_noise_std * fog, rng);
        let blend = rp.fog_blend * fog;
        for (v, n) in img.iter_mut().zip(field) {
            *v = *v * (1.0 - blend) + FOG_GREY * blend + n;
        }
    }
    let night = level(Condition::DayNightCycle);
    if night > 0.0 {
        let scale = 1.0 - rp.darkening * night;
        img.iter_mut().for_each(|v| *v *= scale);
    }
    let rain = level(Condition::Rain);
    if rain > 0.0 {
        let streaks = (rp.rain_streak_density * w as f64 * rain).round() as usize;
        for _ in 0..streaks {
            let x = rng.random_range(0..w);
            let y0 = rng.random_range(0..h);
            let len = rng.random_range(2..=(h / 3).max(2));
            for y in y0..(y0 + len).min(h) {
                img[y * w + x] += 0.3 * rain;
            }
        }
        let normal = Normal::new(0.0, rp.rain_noise_std * rain).expect("finite std");
        img.iter_mut().for_each(|v| *v += normal.sample(rng));
    }
    let snow = level(Condition::Snow);
    if snow > 0.0 {
        let normal = Normal::new(0.0, rp.snow_noise_std * snow).expect("finite std");
        let p_flake = (rp.snow_flake_density * snow).min(1.0);
        for v in img.iter_mut() {
            if rng.random_bool(p_flake) {
                *v = 0.9 + 0.1 * rng.random::<f64>();
            } else {
                *v += normal.sample(rng);
            }
        }
    }

    let sensor = Normal::new(0.0, rp.sensor_noise_std).expect("finite std");
    let mut out = Vec::with_capacity(w * h * spec.channels);
    for v in img {
        let tints = if spec.channels == 3 { &CHANNEL_TINT[..] } else { &CHANNEL_TINT[..1] };
        for &tint in tints {
            out.push(v * tint + sensor.sample(rng));
        }
    }
    out
}
