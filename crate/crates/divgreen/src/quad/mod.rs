//! Quadrature over intervals, curves and regions, and limit extrapolation.

pub mod curve;
pub mod gk;
pub mod limit;
pub mod region;

pub use curve::{integrate_curve, integrate_piece, CurveEstimate};
pub use gk::{adaptive, adaptive_endpoints, integrate, Estimate, Tol};
pub use limit::{
    limit_extrapolate, try_limit_extrapolate, try_limit_extrapolate_vec, LimitResult, LimitStatus, LimitTracker,
    ScaleSchedule, ScheduleError,
};
pub use region::{integrate_region, integrate_scalar, region_area, QuadError, RegionEstimate, RegionOptions, SingularLine};
