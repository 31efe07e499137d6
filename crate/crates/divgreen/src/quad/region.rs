//! Integration over CSG regions.
//!
//! Iterated integration: every vertical section of a region is an exact finite union of
//! intervals, so the inner integral sees the true geometry and the outer integral is split
//! at every abscissa where sections change shape. Declared singular points are handled by
//! dyadic annuli around them whose partial sums are passed through the limit detector.

use crate::geometry::{Point, Region};
use crate::quad::gk::{adaptive_endpoints, max_abs, Tol};
use crate::quad::limit::{LimitStatus, LimitTracker, ScaleSchedule};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("integration region is unbounded")]
    Unbounded,
    #[error("integral diverges near ({x}, {y})")]
    Diverging { x: f64, y: f64 },
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeomError),
}

/// A line through `point` with direction `dir` on which the integrand may blow up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularLine<T> {
    pub point: Point<T>,
    pub dir: Point<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionOptions<T> {
    pub tol: Tol<T>,
    pub singular_points: Vec<Point<T>>,
    pub singular_lines: Vec<SingularLine<T>>,
    pub max_segments: usize,
    /// Partial sums beyond this magnitude are reported as diverging.
    pub cap: T,
    /// Maximum number of dyadic annuli around a singular point.
    pub max_annuli: usize,
}

impl<T: Scalar> Default for RegionOptions<T> {
    fn default() -> Self {
        RegionOptions {
            tol: Tol::new(lit(1e-10), lit(1e-10)),
            singular_points: vec![],
            singular_lines: vec![],
            max_segments: 400,
            cap: lit(1e9),
            max_annuli: 60,
        }
    }
}

impl<T: Scalar> RegionOptions<T> {
    pub fn with_tol(mut self, abs: T, rel: T) -> Self {
        self.tol = Tol::new(abs, rel);
        self
    }

    pub fn with_points(mut self, pts: &[Point<T>]) -> Self {
        self.singular_points.extend_from_slice(pts);
        self
    }

    pub fn with_lines(mut self, lines: &[SingularLine<T>]) -> Self {
        self.singular_lines.extend_from_slice(lines);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionEstimate<T, const N: usize> {
    pub value: [T; N],
    pub error: T,
    pub status: LimitStatus,
}

impl<T: Scalar, const N: usize> RegionEstimate<T, N> {
    fn zero() -> Self {
        RegionEstimate { value: [T::zero(); N], error: T::zero(), status: LimitStatus::Converged }
    }
}

fn plain<T: Scalar, const N: usize, F: Fn(Point<T>) -> [T; N]>(
    f: &F,
    r: &Region<T>,
    opts: &RegionOptions<T>,
    tol: Tol<T>,
) -> Result<RegionEstimate<T, N>, QuadError> {
    let bb = match r.bounded_bbox()? {
        Some(b) => b,
        None => return Ok(RegionEstimate::zero()),
    };
    let mut xs = r.x_breakpoints(&bb);
    for l in &opts.singular_lines {
        if l.dir.x == T::zero() && l.point.x > bb.lo.x && l.point.x < bb.hi.x {
            xs.push(l.point.x);
        }
    }
    for p in &opts.singular_points {
        if p.x > bb.lo.x && p.x < bb.hi.x {
            xs.push(p.x);
        }
    }
    crate::geometry::region::sort_dedup(&mut xs, bb.diameter() * lit(1e-13));
    let width = bb.hi.x - bb.lo.x;
    let inner_tol = Tol::new(tol.abs * lit(0.1) / width.max(T::min_positive_value()), tol.rel * lit(0.1));
    let outer_tol = Tol::new(tol.abs * lit(0.9), tol.rel);
    let max_seg = opts.max_segments;
    let mut inner_err = T::zero();
    let mut total = [T::zero(); N];
    let mut outer_err = T::zero();
    let mut ok = true;
    let lined = !opts.singular_lines.is_empty();
    let mut g = |x: T| -> [T; N] {
        let sec = r.section(x);
        let mut acc = [T::zero(); N];
        for &(y0, y1) in &sec.0 {
            let mut ys = vec![y0, y1];
            for l in &opts.singular_lines {
                if l.dir.x != T::zero() {
                    let y = l.point.y + (x - l.point.x) * (l.dir.y / l.dir.x);
                    if y > y0 && y < y1 {
                        ys.push(y);
                    }
                }
            }
            ys.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            for w in ys.windows(2) {
                let (a, b) = (w[0], w[1]);
                let sa = a != y0;
                let sb = b != y1;
                // Rounding can still put a node exactly on a declared singular line; such a
                // sample is a null set and carries no mass.
                let mut h = |y: T| {
                    let v = f(Point::new(x, y));
                    if lined && !max_abs(&v).is_finite() {
                        [T::zero(); N]
                    } else {
                        v
                    }
                };
                let e = adaptive_endpoints(&mut h, a, b, sa, sb, inner_tol, max_seg);
                inner_err = inner_err.max(e.error);
                for i in 0..N {
                    acc[i] += e.value[i];
                }
            }
        }
        acc
    };
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let e = adaptive_endpoints(&mut g, a, b, true, true, outer_tol, max_seg);
        ok &= e.converged;
        outer_err += e.error;
        for i in 0..N {
            total[i] += e.value[i];
        }
    }
    let error = outer_err + inner_err * width;
    let status = if ok && error <= tol.target(max_abs(&total)) * lit(2.0) {
        LimitStatus::Converged
    } else {
        LimitStatus::BudgetExhausted
    };
    if !max_abs(&total).is_finite() || max_abs(&total) > opts.cap {
        return Ok(RegionEstimate { value: total, error: T::infinity(), status: LimitStatus::Diverging });
    }
    Ok(RegionEstimate { value: total, error, status })
}

/// Integrates `f` over `r` with the given options.
pub fn integrate_region<T: Scalar, const N: usize, F: Fn(Point<T>) -> [T; N]>(
    f: &F,
    r: &Region<T>,
    opts: &RegionOptions<T>,
) -> Result<RegionEstimate<T, N>, QuadError> {
    let bb = match r.bounded_bbox()? {
        Some(b) => b,
        None => return Ok(RegionEstimate::zero()),
    };
    let diam = bb.diameter();
    let near: Vec<Point<T>> = {
        let grown = bb.expand(diam * lit(1e-9));
        let mut v: Vec<Point<T>> = opts
            .singular_points
            .iter()
            .copied()
            .filter(|p| p.x >= grown.lo.x && p.x <= grown.hi.x && p.y >= grown.lo.y && p.y <= grown.hi.y)
            .collect();
        v.dedup();
        v
    };
    if near.is_empty() {
        return plain(f, r, opts, opts.tol);
    }
    // Excision radii: well inside the box and separating the singular points.
    let mut radii = Vec::with_capacity(near.len());
    for (i, p) in near.iter().enumerate() {
        let mut rho = diam * lit(0.25);
        for (j, q) in near.iter().enumerate() {
            if i != j {
                rho = rho.min(p.dist(*q) * lit(0.45));
            }
        }
        // In thin parts of the region every annulus wider than the region contributes about
        // the same amount, which the limit detector would read as growth. Shrink until the
        // region fills a fair share of the disk.
        for _ in 0..50 {
            let a = region_area(&r.clone().intersect(Region::disk(*p, rho)))?;
            if a == T::zero() || a >= lit::<T>(0.05) * T::PI() * rho * rho {
                break;
            }
            rho *= lit(0.5);
        }
        radii.push(rho);
    }
    let mut base = r.clone();
    for (p, rho) in near.iter().zip(&radii) {
        base = base.minus(Region::disk(*p, *rho));
    }
    let sub_opts = RegionOptions { singular_points: vec![], ..opts.clone() };
    let part_tol = Tol::new(opts.tol.abs * lit(0.5), opts.tol.rel * lit(0.5));
    let mut est = plain(f, &base, &sub_opts, part_tol)?;
    let mut status = est.status;
    for (p, rho) in near.iter().zip(&radii) {
        let sched = ScaleSchedule {
            initial: *rho,
            ratio: lit(0.5),
            steps: opts.max_annuli,
            tol: T::zero(),
            cap: opts.cap,
        };
        let mut sum = [T::zero(); N];
        let mut trackers: Vec<LimitTracker<T>> = (0..N).map(|_| LimitTracker::new(sched)).collect();
        let mut piece_err = T::zero();
        for j in 0..opts.max_annuli {
            let outer = *rho * lit::<T>(0.5).powi(j as i32);
            let ring = r.clone().intersect(Region::disk(*p, outer).minus(Region::disk(*p, outer * lit(0.5))));
            let ptol = Tol::new(opts.tol.abs * lit(0.25) * lit::<T>(0.5).powi(j as i32 + 1), opts.tol.rel * lit(0.5));
            let e = plain(f, &ring, &sub_opts, ptol)?;
            piece_err += e.error;
            for i in 0..N {
                sum[i] += e.value[i];
            }
            // Tolerance for the tail follows the accumulated magnitude.
            let target = (opts.tol.abs * lit(0.25)).max(opts.tol.rel * max_abs(&sum) * lit(0.25));
            let mut all_done = true;
            for (i, t) in trackers.iter_mut().enumerate() {
                if t.result().is_none() {
                    t.set_tol(target);
                    t.push(outer, sum[i]);
                }
                all_done &= t.result().is_some();
            }
            if all_done {
                break;
            }
        }
        for (i, t) in trackers.iter_mut().enumerate() {
            let res = t.finish();
            match res.status {
                LimitStatus::Converged => {
                    est.value[i] += res.value;
                    est.error += res.error_bound;
                }
                LimitStatus::Diverging => {
                    return Err(QuadError::Diverging {
                        x: p.x.to_f64().unwrap_or(f64::NAN),
                        y: p.y.to_f64().unwrap_or(f64::NAN),
                    });
                }
                s => {
                    est.value[i] += res.value;
                    est.error += res.error_bound;
                    status = s;
                }
            }
        }
        est.error += piece_err;
    }
    est.status = status;
    Ok(est)
}

/// Scalar wrapper around [`integrate_region`].
pub fn integrate_scalar<T: Scalar, F: Fn(Point<T>) -> T>(
    f: F,
    r: &Region<T>,
    opts: &RegionOptions<T>,
) -> Result<RegionEstimate<T, 1>, QuadError> {
    integrate_region(&|p| [f(p)], r, opts)
}

/// Lebesgue measure of a region.
pub fn region_area<T: Scalar>(r: &Region<T>) -> Result<T, QuadError> {
    let bb = match r.bounded_bbox()? {
        Some(b) => b,
        None => return Ok(T::zero()),
    };
    let xs = r.x_breakpoints(&bb);
    let tol = Tol::new(bb.diameter() * bb.diameter() * lit(1e-13), lit(1e-12));
    let mut total = T::zero();
    let mut g = |x: T| [r.section(x).total_length()];
    for w in xs.windows(2) {
        let e = adaptive_endpoints(&mut g, w[0], w[1], true, true, tol, 400);
        total += e.value[0];
    }
    Ok(total)
}
