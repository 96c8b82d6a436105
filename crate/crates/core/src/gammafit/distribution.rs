use serde::{Deserialize, Serialize};

use super::special::{log_gamma_unchecked, regularized_lower_gamma};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const INVERSE_MAX_ITER: usize = 400;

/// Gamma distribution in the rate parametrization:
/// `f(x) = λ^α / Γ(α) · x^{α−1} e^{−λx}`, mean `α/λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams<T> {
    #[serde(rename = "alpha")]
    shape_alpha: T,
    #[serde(rename = "rate")]
    rate_beta: T,
}

impl<T: Scalar> GammaParams<T> {
    pub fn new(shape_alpha: T, rate_beta: T) -> Result<Self> {
        let ok = |v: T| v > T::zero() && v.is_finite();
        if !ok(shape_alpha) || !ok(rate_beta) {
            return Err(Error::Domain(format!(
                "gamma parameters must be positive and finite (alpha={shape_alpha}, rate={rate_beta})"
            )));
        }
        Ok(Self { shape_alpha, rate_beta })
    }

    pub fn shape(&self) -> T {
        self.shape_alpha
    }

    pub fn rate(&self) -> T {
        self.rate_beta
    }

    pub fn scale(&self) -> T {
        self.rate_beta.recip()
    }

    pub fn mean(&self) -> T {
        self.shape_alpha / self.rate_beta
    }

    pub fn variance(&self) -> T {
        self.shape_alpha / (self.rate_beta * self.rate_beta)
    }

    /// Log-density, evaluated entirely in log space.
    pub fn ln_pdf(&self, x: T) -> Result<T> {
        check_support(x)?;
        let (a, l) = (self.shape_alpha, self.rate_beta);
        Ok(a * l.ln() - log_gamma_unchecked(a) + (a - T::one()) * x.ln() - l * x)
    }

    pub fn pdf(&self, x: T) -> Result<T> {
        self.ln_pdf(x).map(T::exp)
    }

    /// Cumulative distribution `P(α, λx)`.
    pub fn cdf(&self, x: T) -> Result<T> {
        check_support(x)?;
        regularized_lower_gamma(self.shape_alpha, self.rate_beta * x)
    }

    /// Quantile function. Brackets the root of `P(α, y) = prob` in the
    /// standardized variable `y = λx`, bisects to a narrow bracket and then
    /// polishes with safeguarded Newton steps using the density as derivative.
    pub fn inverse_cdf(&self, prob: T) -> Result<T> {
        if !(prob > T::zero() && prob < T::one()) {
            return Err(Error::Domain(format!("probability must lie in (0, 1), got {prob}")));
        }
        let a = self.shape_alpha;
        let tol = T::solver_tol(1e-10);
        let std = Self { shape_alpha: a, rate_beta: T::one() };
        let cdf = |y: T| regularized_lower_gamma(a, y);

        let mut lo = T::zero();
        let mut hi = a.max(T::one());
        let two = T::lit(2.0);
        let mut expansions = 0;
        while cdf(hi)? < prob {
            lo = hi;
            hi = hi * two;
            expansions += 1;
            if expansions > 2000 || !hi.is_finite() {
                return Err(Error::NoConvergence { what: "quantile bracketing", iterations: expansions });
            }
        }

        let narrow = T::solver_tol(1e-6);
        let mut iter = 0;
        while hi - lo > narrow * hi && iter < INVERSE_MAX_ITER {
            let mid = (lo + hi) / two;
            if cdf(mid)? < prob {
                lo = mid;
            } else {
                hi = mid;
            }
            iter += 1;
        }

        let mut y = (lo + hi) / two;
        for _ in iter..INVERSE_MAX_ITER {
            let resid = cdf(y)? - prob;
            if resid.abs() <= tol {
                return Ok(y / self.rate_beta);
            }
            if resid < T::zero() {
                lo = y;
            } else {
                hi = y;
            }
            let dens = std.pdf(y)?;
            let mut next = y - resid / dens;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = (lo + hi) / two;
            }
            if next == y {
                return Ok(y / self.rate_beta);
            }
            y = next;
        }
        Err(Error::NoConvergence { what: "gamma quantile", iterations: INVERSE_MAX_ITER })
    }

    /// Mean log-likelihood of `samples` under these parameters.
    pub fn mean_log_likelihood(&self, samples: &[T]) -> Result<T> {
        if samples.is_empty() {
            return Err(Error::DegenerateData("no samples".into()));
        }
        let mut acc = super::KahanSum::default();
        for &x in samples {
            acc.add(self.ln_pdf(x)?);
        }
        Ok(acc.total() / T::from_usize(samples.len()).unwrap())
    }
}

fn check_support<T: Scalar>(x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma support is (0, inf), got x={x}")))
    }
}

/// Free-function forms of the distribution operations.
pub fn gamma_pdf<T: Scalar>(x: T, p: &GammaParams<T>) -> Result<T> {
    p.pdf(x)
}

pub fn gamma_cdf<T: Scalar>(x: T, p: &GammaParams<T>) -> Result<T> {
    p.cdf(x)
}

pub fn gamma_inverse_cdf<T: Scalar>(prob: T, p: &GammaParams<T>) -> Result<T> {
    p.inverse_cdf(prob)
}
