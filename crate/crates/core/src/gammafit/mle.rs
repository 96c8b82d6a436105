use super::distribution::GammaParams;
use super::special::{digamma, trigamma};
use super::KahanSum;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_NEWTON_ITER: usize = 100;
const NEWTON_REL_TOL: f64 = 1e-10;

/// Outcome of a maximum-likelihood fit, including solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit<T> {
    pub params: GammaParams<T>,
    /// `ln(mean) − mean(ln e)`; the sufficient statistic driving the shape.
    pub log_mean_gap: T,
    pub iterations: usize,
    pub samples: usize,
}

/// Maximum-likelihood gamma fit (rate parametrization).
///
/// The rate is eliminated analytically (`λ = α / ē`), which leaves
/// `ln α − ψ(α) = s` for the shape; that equation is solved by Newton's
/// method from the closed-form starting point
/// `α₀ = (3 − s + √((s − 3)² + 24s)) / (12s)`.
pub fn fit_gamma_mle<T: Scalar>(errors: &[T]) -> Result<GammaParams<T>> {
    fit_gamma_mle_detailed(errors).map(|f| f.params)
}

pub fn fit_gamma_mle_detailed<T: Scalar>(errors: &[T]) -> Result<GammaFit<T>> {
    let n = errors.len();
    if n < 2 {
        return Err(Error::DegenerateData(format!("gamma fit needs at least 2 samples, got {n}")));
    }
    // Statistics and the shape solve are in f64 for every `T`.
    let mut sum = KahanSum::<f64>::default();
    let mut log_sum = KahanSum::<f64>::default();
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for (i, &e) in errors.iter().enumerate() {
        if !(e > T::zero() && e.is_finite()) {
            return Err(Error::Domain(format!("sample {i} is {e}; gamma support is (0, inf)")));
        }
        let v = e.as_f64();
        sum.add(v);
        log_sum.add(v.ln());
        lo = lo.min(e);
        hi = hi.max(e);
    }
    if lo == hi {
        return Err(Error::DegenerateData("all samples are equal; shape is unbounded".into()));
    }
    let n_f = n as f64;
    let mean = sum.total() / n_f;
    let s = mean.ln() - log_sum.total() / n_f;
    if !(s > 0.0) {
        return Err(Error::DegenerateData(format!("non-positive log-mean gap {s}")));
    }

    let mut alpha = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    for iter in 1..=MAX_NEWTON_ITER {
        let f = alpha.ln() - digamma(alpha)? - s;
        let df = alpha.recip() - trigamma(alpha)?;
        let mut next = alpha - f / df;
        if !(next > 0.0) || !next.is_finite() {
            next = alpha / 2.0;
        }
        let rel = ((next - alpha) / alpha).abs();
        alpha = next;
        if rel < NEWTON_REL_TOL {
            let params = GammaParams::new(T::lit(alpha), T::lit(alpha / mean))?;
            return Ok(GammaFit { params, log_mean_gap: T::lit(s), iterations: iter, samples: n });
        }
    }
    Err(Error::NoConvergence { what: "gamma shape Newton solve", iterations: MAX_NEWTON_ITER })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_samples() {
        assert!(matches!(fit_gamma_mle(&[1.0_f64]), Err(Error::DegenerateData(_))));
        assert!(matches!(fit_gamma_mle::<f64>(&[]), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn all_equal_is_degenerate() {
        let err = fit_gamma_mle(&[0.3_f64; 50]).unwrap_err();
        assert!(err.is_numerical());
    }

    #[test]
    fn non_positive_samples_rejected() {
        assert!(matches!(fit_gamma_mle(&[0.1_f64, 0.0, 0.3]), Err(Error::Domain(_))));
        assert!(matches!(fit_gamma_mle(&[0.1_f64, -0.2, 0.3]), Err(Error::Domain(_))));
    }

    #[test]
    fn stationarity_of_the_solution() {
        let data: Vec<f64> = (1..200).map(|i| 0.01 + (f64::from(i) * 0.37).sin().abs()).collect();
        let fit = fit_gamma_mle_detailed(&data).unwrap();
        let a = fit.params.shape();
        let resid = a.ln() - digamma(a).unwrap() - fit.log_mean_gap;
        assert!(resid.abs() < 1e-12);
        let mean = data.iter().sum::<f64>() / data.len() as f64;
        assert!((fit.params.mean() - mean).abs() < 1e-12);
        assert!(fit.iterations < 10);
    }
}
