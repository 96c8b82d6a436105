use serde::{Deserialize, Serialize};

use super::distribution::GammaParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Alarm threshold: the `(1 − ε)` quantile of the nominal error model.
/// Errors `>= theta` are anomalous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec<T> {
    pub epsilon: T,
    pub theta: T,
}

pub fn estimate_threshold<T: Scalar>(params: &GammaParams<T>, epsilon: T) -> Result<ThresholdSpec<T>> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let theta = params.inverse_cdf(T::one() - epsilon)?;
    Ok(ThresholdSpec { epsilon, theta })
}

impl<T: Scalar> ThresholdSpec<T> {
    #[inline]
    pub fn is_anomalous(&self, error: T) -> bool {
        error >= self.theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_thresholds() {
        let p = GammaParams::new(1.0_f64, 1.0).unwrap();
        assert!((estimate_threshold(&p, 0.01).unwrap().theta - 4.605_170).abs() < 1e-6);
        assert!((estimate_threshold(&p, 0.05).unwrap().theta - 2.995_732).abs() < 1e-6);
    }

    #[test]
    fn half_epsilon_is_the_median() {
        let p = GammaParams::new(15.0_f64, 392.0).unwrap();
        let t = estimate_threshold(&p, 0.5).unwrap();
        assert!((p.cdf(t.theta).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn invalid_epsilon() {
        let p = GammaParams::new(2.0_f64, 1.0).unwrap();
        for e in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(estimate_threshold(&p, e).is_err());
        }
    }

    #[test]
    fn boundary_is_inclusive() {
        let t = ThresholdSpec { epsilon: 0.05_f64, theta: 0.2 };
        assert!(t.is_anomalous(0.2));
        assert!(!t.is_anomalous(0.199_999));
    }
}
