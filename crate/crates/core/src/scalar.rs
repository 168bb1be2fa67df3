//! Floating-point abstraction shared by the geometry and search code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};

/// Real scalar the kinematic and search routines are generic over.
///
/// Blanket-implemented for every type with the required bounds, which in
/// practice means `f32` and `f64`.
pub trait Scalar: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` constant into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        // Every finite f64 converts (possibly rounding) for the float types.
        Self::from(x).expect("f64 literal representable")
    }

    /// Converts `self` to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `x` clamped from below to a small multiple of machine epsilon, so
    /// that tolerance defaults stay meaningful at lower precision.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }
}

impl<T> Scalar for T where T: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {}

/// Sign function that maps zero to `+1`.
#[inline]
pub(crate) fn sgn<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one()
    } else {
        -T::one()
    }
}
