//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type the library can be instantiated with (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + serde::Serialize
    + 'static
{
    /// Converts an `f64` literal into this type.
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
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `R`.
pub type Cx<R> = Complex<R>;

#[inline]
pub(crate) fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<R: Real>(x: R) -> Cx<R> {
    Complex::new(x, R::zero())
}

/// `|re| + |im|`, the cheap modulus used for deflation and pivoting.
#[inline]
pub(crate) fn abs1<R: Real>(z: Cx<R>) -> R {
    z.re.abs() + z.im.abs()
}
