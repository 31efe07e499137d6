//! Numerical generalized Gauss-Green formulas in the plane.
//!
//! The geometry and quadrature layers are generic over [`Scalar`]; the measure, field,
//! normal and trace layers work in `f64` and are re-exported through the aliases below.

pub mod fam;
pub mod fields;
pub mod geometry;
pub mod normal;
pub mod quad;
pub mod scalar;
pub mod trace;

pub use scalar::Scalar;

pub type Point = geometry::Point<f64>;
pub type Region = geometry::Region<f64>;
pub type BoundaryCurve = geometry::BoundaryCurve<f64>;
pub type ScaleSchedule = quad::ScaleSchedule<f64>;
pub type LimitResult = quad::LimitResult<f64>;
