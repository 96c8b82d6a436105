//! Black-box misbehaviour prediction for camera-driven systems.
//!
//! A reconstructor learns nominal frames; its per-frame reconstruction error
//! is smoothed, compared against a threshold derived from a gamma model of
//! nominal errors, and turned into alarms. A synthetic scenario generator and
//! an evaluation kit provide ground truth and window-level metrics.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the command-line pipeline uses.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detector;
pub mod error;
pub mod evalkit;
pub mod gammafit;
pub mod reconstruct;
pub mod scalar;
pub mod scenario;
pub mod smoothing;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FrameTensor = reconstruct::FrameTensor<f64>;
pub type FrameStream = reconstruct::FrameStream<f64>;
pub type ReconstructorModel = reconstruct::ReconstructorModel<f64>;
pub type ErrorSeries = reconstruct::ErrorSeries<f64>;
pub type GammaParams = gammafit::GammaParams<f64>;
pub type ThresholdSpec = gammafit::ThresholdSpec<f64>;
pub type Calibration = gammafit::Calibration<f64>;
pub type ArFilterConfig = smoothing::ArFilterConfig<f64>;
pub type DetectorConfig = detector::DetectorConfig<f64>;
