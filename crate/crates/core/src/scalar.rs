//! Scalar abstraction shared by every numeric module.
//!
//! All of the simulation code is written against [`Real`], so the same
//! kernels run in `f64` (the default everywhere in the CLI) or in `f32` when
//! a cheaper, lower-precision evaluation is good enough.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the simulators and optimizers.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot
    /// represent finite `f64` values, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    /// Reduces an angle into `[0, 2π)`.
    fn wrap_angle(self) -> Self {
        let tau = Self::two_pi();
        let mut r = self % tau;
        if r < Self::zero() {
            r = r + tau;
        }
        if r >= tau {
            r = Self::zero();
        }
        r
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
