//! Nominal error model: maximum-likelihood gamma fit and the derived alarm
//! threshold `θ = F⁻¹(1 − ε)`.
//!
//! The canonical parametrization is shape/RATE (`mean = α/λ`); the MLE sets
//! `λ = α / ē`.

mod distribution;
mod io;
mod mle;
pub mod special;
mod threshold;

pub use distribution::{gamma_cdf, gamma_inverse_cdf, gamma_pdf, GammaParams};
pub use io::{read_calibration, write_calibration, Calibration};
pub use mle::{fit_gamma_mle, fit_gamma_mle_detailed, GammaFit, MAX_NEWTON_ITER};
pub use special::{digamma, log_gamma, regularized_lower_gamma, trigamma};
pub use threshold::{estimate_threshold, ThresholdSpec};

use crate::scalar::Scalar;

/// Compensated summation; keeps `f32` accumulation over 10⁶ samples honest.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> KahanSum<T> {
    pub(crate) fn add(&mut self, v: T) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn total(&self) -> T {
        self.sum
    }
}
