use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Region};
use crate::quad::{integrate_region, try_limit_extrapolate, LimitStatus, QuadError, RegionOptions, ScaleSchedule};
use crate::scalar::{lit, Scalar};

/// Tolerance around {0, 1/2, 1} used to name a density.
pub const CLASS_TOL: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    EssentialInterior,
    EssentialExterior,
    ReducedBoundary,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointClass<T> {
    pub kind: ClassKind,
    pub density: T,
    pub status: LimitStatus,
    /// Limiting measure-theoretic outer normal when one was detected.
    pub normal: Option<Point<T>>,
}

fn ball_moments<T: Scalar>(r: &Region<T>, p: Point<T>, delta: T) -> Result<[T; 3], QuadError> {
    let ball = Region::disk(p, delta);
    let piece = r.clone().intersect(ball);
    let tol = delta * delta * lit(1e-12);
    let opts = RegionOptions::default().with_tol(tol, lit(1e-11));
    let e = integrate_region(&|q: Point<T>| [T::one(), q.x - p.x, q.y - p.y], &piece, &opts)?;
    Ok(e.value)
}

/// `lambda(r cap B(p, delta)) / lambda(B(p, delta))`.
pub fn density_at<T: Scalar>(r: &Region<T>, p: Point<T>, delta: T) -> Result<T, QuadError> {
    let m = ball_moments(r, p, delta)?;
    Ok((m[0] / (T::PI() * delta * delta)).max(T::zero()).min(T::one()))
}

/// Classifies `p` by the limit of ball densities along the schedule.
pub fn classify_point<T: Scalar>(r: &Region<T>, p: Point<T>, s: &ScaleSchedule<T>) -> Result<PointClass<T>, QuadError> {
    let mut normals: Vec<Option<Point<T>>> = Vec::new();
    let res = try_limit_extrapolate(
        |d| {
            let m = ball_moments(r, p, d)?;
            let c = Point::new(m[1], m[2]);
            // The centroid of the inside part sits opposite to the outer normal.
            let n = if c.norm() > d * d * d * lit(1e-6) { Some(-c.normalized()) } else { None };
            normals.push(n);
            Ok::<T, QuadError>(m[0] / (T::PI() * d * d))
        },
        s,
    )?;
    let density = res.value.max(T::zero()).min(T::one());
    let tol = lit::<T>(CLASS_TOL);
    let stable_normal = match normals.as_slice() {
        [.., Some(a), Some(b)] if (*a - *b).norm() < lit(1e-3) => Some(*b),
        _ => None,
    };
    let kind = if res.status != LimitStatus::Converged {
        ClassKind::Other
    } else if (density - T::one()).abs() <= tol {
        ClassKind::EssentialInterior
    } else if density.abs() <= tol {
        ClassKind::EssentialExterior
    } else if (density - lit(0.5)).abs() <= tol && stable_normal.is_some() {
        ClassKind::ReducedBoundary
    } else {
        ClassKind::Other
    };
    let normal = if kind == ClassKind::ReducedBoundary { stable_normal } else { None };
    Ok(PointClass { kind, density, status: res.status, normal })
}
