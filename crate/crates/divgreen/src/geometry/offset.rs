use serde::{Deserialize, Serialize};

use crate::geometry::curve::{reduced_boundary, Piece};
use crate::geometry::point::Point;
use crate::geometry::region::{GeomError, Region};
use crate::scalar::{lit, to_f64, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Outer,
    Inner,
}

/// Open delta-neighbourhood of one boundary piece.
fn piece_neighbourhood<T: Scalar>(p: &Piece<T>, delta: T) -> Region<T> {
    match *p {
        Piece::Segment { a, b, .. } => {
            let l = a.dist(b);
            let u = (b - a) * l.recip();
            let v = u.perp();
            let slab = Region::half_plane(v, v.dot(a) + delta)
                .intersect(Region::half_plane(-v, -v.dot(a) + delta))
                .intersect(Region::half_plane(u, u.dot(a) + l))
                .intersect(Region::half_plane(-u, -u.dot(a)));
            // Oblique slabs get an explicit box so their bounding box stays finite.
            let slab = if u.x != T::zero() && u.y != T::zero() {
                slab.intersect(Region::rect(
                    Point::new(a.x.min(b.x) - delta, a.y.min(b.y) - delta),
                    Point::new(a.x.max(b.x) + delta, a.y.max(b.y) + delta),
                ))
            } else {
                slab
            };
            slab.union(Region::disk(a, delta)).union(Region::disk(b, delta))
        }
        Piece::Arc { center, radius, start, sweep, .. } => {
            let ring = Region::disk(center, radius + delta).minus(Region::disk(center, radius - delta));
            let two_pi = T::PI() + T::PI();
            let band = if sweep >= two_pi - lit(1e-12) {
                ring
            } else {
                ring.intersect(Region::wedge(center, start, sweep))
            };
            band.union(Region::disk(p.start_point(), delta)).union(Region::disk(p.end_point(), delta))
        }
    }
}

/// Outer neighbourhood `{dist(., r) < delta}` or inner set `{p in r : dist(p, r^c) > delta}`.
///
/// Disks and boxes get closed forms; composites are assembled from the neighbourhoods of the
/// reduced-boundary pieces, which is exact because the topological boundary of a CSG region
/// is the closure of its reduced boundary.
pub fn neighborhood<T: Scalar>(r: &Region<T>, delta: T, side: Side) -> Result<Region<T>, GeomError> {
    if delta <= T::zero() {
        return Err(GeomError::Degenerate("neighbourhood width must be positive".into()));
    }
    let empty = || GeomError::EmptyInner { delta: to_f64(delta) };
    match (r, side) {
        (Region::Disk { center, radius }, Side::Outer) => Ok(Region::disk(*center, *radius + delta)),
        (Region::Disk { center, radius }, Side::Inner) => {
            if *radius > delta {
                Ok(Region::disk(*center, *radius - delta))
            } else {
                Err(empty())
            }
        }
        (Region::Rect { lo, hi }, Side::Outer) => {
            let dx = Point::new(delta, T::zero());
            let dy = Point::new(T::zero(), delta);
            let mut out = Region::rect(*lo - dx, *hi + dx).union(Region::rect(*lo - dy, *hi + dy));
            for c in [*lo, Point::new(hi.x, lo.y), *hi, Point::new(lo.x, hi.y)] {
                out = out.union(Region::disk(c, delta));
            }
            Ok(out)
        }
        (Region::Rect { lo, hi }, Side::Inner) => {
            let d = Point::new(delta, delta);
            let inner = Region::rect(*lo + d, *hi - d);
            if matches!(inner, Region::Empty) {
                Err(empty())
            } else {
                Ok(inner)
            }
        }
        _ => {
            r.bounded_bbox()?;
            let curve = reduced_boundary(r, None)?;
            let mut tube = Region::Empty;
            for p in &curve.pieces {
                tube = tube.union(piece_neighbourhood(p, delta));
            }
            match side {
                Side::Outer => Ok(r.clone().union(tube)),
                Side::Inner => {
                    let out = r.clone().minus(tube);
                    let area = crate::quad::region_area(&out).unwrap_or(T::zero());
                    if area <= T::zero() {
                        Err(empty())
                    } else {
                        Ok(out)
                    }
                }
            }
        }
    }
}

/// Length of the boundary of the delta-neighbourhood.
pub fn shell_area<T: Scalar>(r: &Region<T>, delta: T, side: Side) -> Result<T, GeomError> {
    let n = neighborhood(r, delta, side)?;
    Ok(reduced_boundary(&n, None)?.length())
}
