//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real floating-point scalar: `f32` or `f64`.
///
/// Everything downstream of the Gaussian algebra (filters, Welch estimators,
/// the time-domain pipeline) is written against this trait. Large squeezing
/// parameters need `f64`: the anti-squeezed quadrature of an `r = 20` ancilla
/// has amplitude ~5e8 and its feed-forward cancellation leaves residuals of
/// order `eps * 5e8`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Decibels from a power ratio.
#[inline]
pub fn power_db<T: Real>(ratio: T) -> T {
    T::lit(10.0) * ratio.log10()
}

/// Power ratio from decibels.
#[inline]
pub fn db_to_power<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Quadrature variance factor `e^{-2r}` expressed in dB.
#[inline]
pub fn squeeze_param_to_db<T: Real>(r: T) -> T {
    power_db((-(T::lit(2.0)) * r).exp())
}

/// Squeezing parameter `r` (nepers) producing the given (negative) dB level.
#[inline]
pub fn db_to_squeeze_param<T: Real>(db: T) -> T {
    -db_to_power(db).ln() / T::lit(2.0)
}
