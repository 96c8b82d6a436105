//! Autoregressive smoothing of raw error series.
//!
//! `out[t] = α₀ + Σᵢ αᵢ · raw[t − i + 1]` over the `k` most recent values,
//! the current one included. Before `k` values exist the output is the
//! uniform mean of the values seen so far. The default configuration
//! (`α₀ = 0`, `αᵢ = 1/k`) is a trailing moving average.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reconstruct::ErrorSeries;
use crate::scalar::{from_usize, Scalar};

pub const DEFAULT_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArFilterConfig<T> {
    pub order_k: usize,
    /// `coefficients[i]` weighs the value `i` steps back (0 = current).
    pub coefficients: Vec<T>,
    pub intercept: T,
}

impl<T: Scalar> ArFilterConfig<T> {
    /// Uniform weights `1/k`, zero intercept.
    pub fn moving_average(order_k: usize) -> Result<Self> {
        if order_k == 0 {
            return Err(Error::InvalidConfig("AR order k must be >= 1".into()));
        }
        let w = from_usize::<T>(order_k).recip();
        Ok(Self { order_k, coefficients: vec![w; order_k], intercept: T::zero() })
    }

    pub fn validate(&self) -> Result<()> {
        if self.order_k == 0 {
            return Err(Error::InvalidConfig("AR order k must be >= 1".into()));
        }
        if self.coefficients.len() != self.order_k {
            return Err(Error::InvalidConfig(format!(
                "AR order {} but {} coefficients",
                self.order_k,
                self.coefficients.len()
            )));
        }
        // keeps the smoothed series a valid (non-negative) error series
        if self.intercept < T::zero() || self.coefficients.iter().any(|c| !(*c >= T::zero())) {
            return Err(Error::InvalidConfig("AR coefficients and intercept must be non-negative".into()));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for ArFilterConfig<T> {
    fn default() -> Self {
        Self::moving_average(DEFAULT_ORDER).expect("non-zero default order")
    }
}

/// Streaming form of [`ar_filter`]: a ring buffer of the last `k` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArSmoother<T> {
    cfg: ArFilterConfig<T>,
    window: VecDeque<T>,
}

impl<T: Scalar> ArSmoother<T> {
    pub fn new(cfg: ArFilterConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let window = VecDeque::with_capacity(cfg.order_k);
        Ok(Self { cfg, window })
    }

    pub fn push(&mut self, value: T) -> T {
        if self.window.len() == self.cfg.order_k {
            self.window.pop_back();
        }
        self.window.push_front(value);
        if self.window.len() < self.cfg.order_k {
            self.window.iter().copied().sum::<T>() / from_usize::<T>(self.window.len())
        } else {
            self.window.iter().zip(&self.cfg.coefficients).fold(self.cfg.intercept, |acc, (&v, &c)| acc + c * v)
        }
    }
}

pub fn ar_filter<T: Scalar>(raw: &ErrorSeries<T>, cfg: &ArFilterConfig<T>) -> Result<ErrorSeries<T>> {
    if raw.is_empty() {
        return Err(Error::InvalidConfig("cannot smooth an empty error series".into()));
    }
    let mut smoother = ArSmoother::new(cfg.clone())?;
    let values = raw.values().iter().map(|&v| smoother.push(v)).collect();
    ErrorSeries::new(values, raw.start_index())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series(v: &[f64]) -> ErrorSeries<f64> {
        ErrorSeries::new(v.to_vec(), 0).unwrap()
    }

    /// Independent reference: explicit window sums.
    fn reference(raw: &[f64], k: usize) -> Vec<f64> {
        (0..raw.len())
            .map(|t| {
                let lo = (t + 1).saturating_sub(k);
                raw[lo..=t].iter().sum::<f64>() / (t + 1 - lo) as f64
            })
            .collect()
    }

    #[test]
    fn warm_up_then_full_window() {
        let out = ar_filter(&series(&[3.0, 6.0, 9.0]), &ArFilterConfig::moving_average(3).unwrap()).unwrap();
        assert_eq!(out.values(), &[3.0, 4.5, 6.0]);
    }

    #[test]
    fn constant_input_is_fixed_point() {
        for k in [1, 2, 7, 30] {
            let out = ar_filter(&series(&[0.25; 50]), &ArFilterConfig::moving_average(k).unwrap()).unwrap();
            assert!(out.values().iter().all(|&v| (v - 0.25).abs() < 1e-15));
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(ArFilterConfig::<f64>::moving_average(0).is_err());
        let bad = ArFilterConfig { order_k: 3, coefficients: vec![0.5_f64, 0.5], intercept: 0.0 };
        assert!(ar_filter(&series(&[1.0]), &bad).is_err());
        let empty = ErrorSeries::<f64>::new(vec![], 0).unwrap();
        assert!(ar_filter(&empty, &ArFilterConfig::default()).is_err());
    }

    #[test]
    fn custom_coefficients_and_start_index() {
        let cfg = ArFilterConfig { order_k: 2, coefficients: vec![0.75_f64, 0.25], intercept: 0.1 };
        let raw = ErrorSeries::new(vec![1.0, 2.0, 4.0], 5).unwrap();
        let out = ar_filter(&raw, &cfg).unwrap();
        assert_eq!(out.start_index(), 5);
        assert_eq!(out.values(), &[1.0, 0.1 + 1.5 + 0.25, 0.1 + 3.0 + 0.5]);
    }

    #[test]
    fn variance_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let raw: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let var = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
        };
        let k = 10;
        let out = ar_filter(&series(&raw), &ArFilterConfig::moving_average(k).unwrap()).unwrap();
        let ratio = var(out.values()) / (var(&raw) / k as f64);
        assert!((0.6..=1.4).contains(&ratio), "ratio {ratio}");
    }

    proptest! {
        #[test]
        fn matches_reference_and_stays_in_range(raw in prop::collection::vec(0.0f64..10.0, 1..80), k in 1usize..15) {
            let out = ar_filter(&series(&raw), &ArFilterConfig::moving_average(k).unwrap()).unwrap();
            let expect = reference(&raw, k);
            let (lo, hi) = raw.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
            for (o, e) in out.values().iter().zip(&expect) {
                prop_assert!((o - e).abs() < 1e-12);
                prop_assert!(*o >= lo - 1e-12 && *o <= hi + 1e-12);
            }
        }

        #[test]
        fn affine_equivariance(raw in prop::collection::vec(0.0f64..5.0, 1..60), k in 1usize..12, a in 0.1f64..4.0, b in 0.0f64..3.0) {
            let cfg = ArFilterConfig::moving_average(k).unwrap();
            let base = ar_filter(&series(&raw), &cfg).unwrap();
            let shifted: Vec<f64> = raw.iter().map(|v| a * v + b).collect();
            let moved = ar_filter(&series(&shifted), &cfg).unwrap();
            for (m, o) in moved.values().iter().zip(base.values()) {
                prop_assert!((m - (a * o + b)).abs() < 1e-9);
            }
        }

        #[test]
        fn leading_constant_segment_does_not_change_full_windows(raw in prop::collection::vec(0.0f64..5.0, 1..60), k in 1usize..12, pad in 1usize..20) {
            let cfg = ArFilterConfig::moving_average(k).unwrap();
            let base = ar_filter(&series(&raw), &cfg).unwrap();
            let mut padded = vec![raw[0]; pad];
            padded.extend_from_slice(&raw);
            let out = ar_filter(&series(&padded), &cfg).unwrap();
            let trimmed = &out.values()[pad..];
            for t in (k - 1)..raw.len() {
                prop_assert!((trimmed[t] - base.values()[t]).abs() < 1e-12);
            }
        }
    }
}
