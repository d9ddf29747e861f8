use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the toolkit is generic over (`f32`, `f64`).
///
/// Everything downstream works on `Complex<T>` built from this type; the
/// concrete aliases at the crate root pin `T = f64`, which is what the CLI
/// and the stated tolerances assume.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {}

/// Pull an `f64` literal into the working precision.
#[inline]
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable in scalar type")
}

/// Lossy view of a scalar as `f64`, for error payloads and reports.
#[inline]
pub(crate) fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Default numerical tolerance (1e-10) used wherever none is supplied.
#[inline]
pub fn default_tol<T: Real>() -> T {
    real(1e-10)
}
