//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the analysis code is generic over.
///
/// Implemented for `f32` and `f64`. Constants are written as `f64` literals
/// and converted with [`Real::lit`].
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count or index.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Amplitude ratio to decibels (`20·log10`).
#[inline]
pub fn amplitude_to_db<T: Real>(ratio: T) -> T {
    T::lit(20.0) * ratio.log10()
}

/// Power ratio to decibels (`10·log10`).
#[inline]
pub fn power_to_db<T: Real>(ratio: T) -> T {
    T::lit(10.0) * ratio.log10()
}

/// Decibels to power ratio.
#[inline]
pub fn db_to_power<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Decibels to amplitude ratio.
#[inline]
pub fn db_to_amplitude<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(20.0))
}

/// Median of a slice (average of the two middle values for even lengths).
/// Returns `None` for an empty slice.
pub(crate) fn median<T: Real>(values: &[T]) -> Option<T> {
    percentile(values, T::lit(0.5))
}

/// Linear-interpolated percentile (`q` in `[0, 1]`) between order statistics.
pub(crate) fn percentile<T: Real>(values: &[T], q: T) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let pos = q * T::from_usize_lossy(sorted.len() - 1);
    let lo = pos.floor().to_usize().unwrap_or(0).min(sorted.len() - 1);
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - T::from_usize_lossy(lo);
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}
