//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64` for serialization and reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used by iterative solvers: `requested` clamped to a few ulps of 1.
    #[inline]
    fn solver_tol(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(8.0);
        Self::lit(requested).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convenience: `usize` to scalar.
#[inline]
pub(crate) fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("usize representable in scalar type")
}
