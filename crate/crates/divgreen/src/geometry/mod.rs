//! Plane regions of finite perimeter built by constructive solid geometry.

pub mod classify;
pub mod curve;
pub mod intervals;
pub mod offset;
pub mod point;
pub mod region;

pub use classify::{classify_point, density_at, ClassKind, PointClass};
pub use curve::{perimeter, reduced_boundary, reduced_boundary_cut, signed_distance, BoundaryCurve, DistanceField, Piece, SignedDistance};
pub use intervals::Intervals;
pub use offset::{neighborhood, shell_area, Side};
pub use point::Point;
pub use region::{BBox, GeomError, Region};
