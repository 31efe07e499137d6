use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Floating point type the geometry and quadrature layers are generic over.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Default + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Lossy conversion used for reporting.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
