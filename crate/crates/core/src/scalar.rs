//! Floating-point scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar: `f32` or `f64`.
///
/// Everything in the library is written against this trait; the concrete
/// aliases at the crate root pick `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Gauss error function.
    fn erf(self) -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl Scalar for f64 {
    #[inline]
    fn erf(self) -> Self {
        libm::erf(self)
    }
}

impl Scalar for f32 {
    #[inline]
    fn erf(self) -> Self {
        libm::erff(self)
    }
}

/// Standard normal CDF.
#[inline]
pub fn normal_cdf<T: Scalar>(z: T) -> T {
    let half = T::lit(0.5);
    half * (T::one() + (z / T::SQRT_2()).erf())
}

/// `x * ln(x / y)` with the conventions `0 ln(0/y) = 0` and `x ln(x/0) = +inf`.
#[inline]
pub fn xlogx_over_y<T: Scalar>(x: T, y: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else if y <= T::zero() {
        T::infinity()
    } else {
        x * (x / y).ln()
    }
}
