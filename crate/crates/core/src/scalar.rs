//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Complex scalar over a [`Real`] field.
pub type Complex<T> = nalgebra::Complex<T>;

/// Floating-point field the library is generic over (`f32` or `f64`).
///
/// Tolerances throughout the crate are stated for `f64`. [`Real::tol`] widens
/// them to the precision floor of narrower types so that the same checks stay
/// meaningful in single precision.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Serialize + DeserializeOwned + Send + Sync + 'static
{
    /// Smallest absolute tolerance that is attainable at this precision.
    const PRECISION_FLOOR: f64;

    /// Converts an `f64` constant.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Converts a count or index.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite value")
    }

    /// An `f64` tolerance, raised to this type's precision floor.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::of(x.max(Self::PRECISION_FLOOR))
    }
}

impl Real for f64 {
    const PRECISION_FLOOR: f64 = 0.0;
}

impl Real for f32 {
    const PRECISION_FLOOR: f64 = 1e-4;
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Modulus `|z|`.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}
