//! Real scalar abstraction for the simulation core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type usable for amplitudes and coefficients: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Send
    + Sync
    + Debug
    + Display
    + 'static
{
    /// Lossy conversion from `f64`; used for couplings and angles.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
