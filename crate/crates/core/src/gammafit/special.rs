//! Special functions: log-gamma, digamma, trigamma and the regularized
//! lower incomplete gamma function.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_SERIES_TERMS: usize = 100_000;

fn require_positive<T: Scalar>(z: T, what: &str) -> Result<()> {
    if z > T::zero() && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} requires a positive finite argument, got {z}")))
    }
}

/// `ln Γ(z)` for `z > 0` (Lanczos, g = 7, nine coefficients).
pub fn log_gamma<T: Scalar>(z: T) -> Result<T> {
    require_positive(z, "log_gamma")?;
    Ok(log_gamma_unchecked(z))
}

pub(crate) fn log_gamma_unchecked<T: Scalar>(z: T) -> T {
    let half = T::lit(0.5);
    let pi = T::lit(std::f64::consts::PI);
    if z < half {
        // reflection: Γ(z)Γ(1−z) = π / sin(πz)
        return (pi / (pi * z).sin()).ln() - log_gamma_unchecked(T::one() - z);
    }
    let z = z - T::one();
    let mut x = T::lit(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x = x + T::lit(c) / (z + T::lit(i as f64));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (z + half) * t.ln() - t + x.ln()
}

/// Digamma ψ(z) = d/dz ln Γ(z).
pub fn digamma<T: Scalar>(z: T) -> Result<T> {
    require_positive(z, "digamma")?;
    let mut z = z;
    let mut acc = T::zero();
    let shift_to = T::lit(10.0);
    while z < shift_to {
        acc = acc - z.recip();
        z = z + T::one();
    }
    let inv = z.recip();
    let inv2 = inv * inv;
    // ln z − 1/(2z) − Σ B₂ₙ / (2n z²ⁿ)
    let series = inv2
        * (T::lit(1.0 / 12.0)
            - inv2
                * (T::lit(1.0 / 120.0)
                    - inv2
                        * (T::lit(1.0 / 252.0)
                            - inv2
                                * (T::lit(1.0 / 240.0)
                                    - inv2 * (T::lit(1.0 / 132.0) - inv2 * T::lit(691.0 / 32_760.0))))));
    Ok(acc + z.ln() - T::lit(0.5) * inv - series)
}

/// Trigamma ψ′(z).
pub fn trigamma<T: Scalar>(z: T) -> Result<T> {
    require_positive(z, "trigamma")?;
    let mut z = z;
    let mut acc = T::zero();
    let shift_to = T::lit(10.0);
    while z < shift_to {
        acc = acc + (z * z).recip();
        z = z + T::one();
    }
    let inv = z.recip();
    let inv2 = inv * inv;
    // 1/z + 1/(2z²) + Σ B₂ₙ / z²ⁿ⁺¹
    let series = inv
        * inv2
        * (T::lit(1.0 / 6.0)
            - inv2
                * (T::lit(1.0 / 30.0)
                    - inv2
                        * (T::lit(1.0 / 42.0)
                            - inv2
                                * (T::lit(1.0 / 30.0) - inv2 * (T::lit(5.0 / 66.0) - inv2 * T::lit(691.0 / 2730.0))))));
    Ok(acc + inv + T::lit(0.5) * inv2 + series)
}

/// Regularized lower incomplete gamma `P(a, x)`.
///
/// Power series when `x < a + 1`, modified Lentz continued fraction for the
/// complement otherwise.
pub fn regularized_lower_gamma<T: Scalar>(a: T, x: T) -> Result<T> {
    require_positive(a, "regularized_lower_gamma shape")?;
    if x.is_nan() || x < T::zero() {
        return Err(Error::Domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(T::one());
    }
    if x < a + T::one() {
        lower_series(a, x)
    } else {
        upper_continued_fraction(a, x).map(|q| T::one() - q)
    }
}

/// `exp(−x + a ln x − ln Γ(a))`, the common prefactor of both expansions.
fn prefactor<T: Scalar>(a: T, x: T) -> T {
    (a * x.ln() - x - log_gamma_unchecked(a)).exp()
}

fn lower_series<T: Scalar>(a: T, x: T) -> Result<T> {
    let eps = T::epsilon();
    let mut ap = a;
    let mut del = a.recip();
    let mut sum = del;
    for _ in 0..MAX_SERIES_TERMS {
        ap = ap + T::one();
        del = del * x / ap;
        sum = sum + del;
        if del.abs() < sum.abs() * eps {
            return Ok((sum * prefactor(a, x)).min(T::one()));
        }
    }
    Err(Error::NoConvergence { what: "incomplete gamma series", iterations: MAX_SERIES_TERMS })
}

fn upper_continued_fraction<T: Scalar>(a: T, x: T) -> Result<T> {
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    let two = T::lit(2.0);
    let mut b = x + T::one() - a;
    let mut c = tiny.recip();
    let mut d = b.recip();
    let mut h = d;
    for i in 1..MAX_SERIES_TERMS {
        let i_t = T::lit(i as f64);
        let an = -i_t * (i_t - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let del = d * c;
        h = h * del;
        if (del - T::one()).abs() <= eps {
            return Ok((prefactor(a, x) * h).max(T::zero()));
        }
    }
    Err(Error::NoConvergence { what: "incomplete gamma continued fraction", iterations: MAX_SERIES_TERMS })
}
