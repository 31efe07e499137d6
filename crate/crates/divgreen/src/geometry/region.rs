use std::f64::consts::PI;

use crate::geometry::intervals::Intervals;
use crate::geometry::point::Point;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("region is unbounded")]
    Unbounded,
    #[error("degenerate primitive: {0}")]
    Degenerate(String),
    #[error("tangential contact between operand boundaries near ({x}, {y})")]
    TangentialContact { x: f64, y: f64 },
    #[error("inner neighbourhood of width {delta} is empty")]
    EmptyInner { delta: f64 },
}

/// A plane set built from disks, axis boxes and half-planes.
///
/// All primitives are open, so membership is strict and exact.
#[derive(Clone, Debug, PartialEq)]
pub enum Region<T> {
    Empty,
    Disk { center: Point<T>, radius: T },
    Rect { lo: Point<T>, hi: Point<T> },
    /// `{p : normal . p < offset}` with a unit normal.
    HalfPlane { normal: Point<T>, offset: T },
    Union(Box<Region<T>>, Box<Region<T>>),
    Intersection(Box<Region<T>>, Box<Region<T>>),
    Difference(Box<Region<T>>, Box<Region<T>>),
}

/// Boundary curve of a single primitive, with the outward normal of that primitive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Prim<T> {
    Circle { c: Point<T>, r: T },
    Seg { a: Point<T>, b: Point<T>, normal: Point<T> },
}

/// Axis aligned bounding box, possibly with infinite coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox<T> {
    pub lo: Point<T>,
    pub hi: Point<T>,
}

impl<T: Scalar> BBox<T> {
    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn diameter(&self) -> T {
        self.lo.dist(self.hi)
    }

    pub fn center(&self) -> Point<T> {
        (self.lo + self.hi) * lit(0.5)
    }

    fn union(&self, o: &Self) -> Self {
        BBox {
            lo: Point::new(self.lo.x.min(o.lo.x), self.lo.y.min(o.lo.y)),
            hi: Point::new(self.hi.x.max(o.hi.x), self.hi.y.max(o.hi.y)),
        }
    }

    fn intersect(&self, o: &Self) -> Option<Self> {
        let b = BBox {
            lo: Point::new(self.lo.x.max(o.lo.x), self.lo.y.max(o.lo.y)),
            hi: Point::new(self.hi.x.min(o.hi.x), self.hi.y.min(o.hi.y)),
        };
        (b.lo.x < b.hi.x && b.lo.y < b.hi.y).then_some(b)
    }

    pub fn expand(&self, m: T) -> Self {
        BBox {
            lo: Point::new(self.lo.x - m, self.lo.y - m),
            hi: Point::new(self.hi.x + m, self.hi.y + m),
        }
    }
}

impl<T: Scalar> Region<T> {
    pub fn disk(center: Point<T>, radius: T) -> Self {
        if radius > T::zero() {
            Region::Disk { center, radius }
        } else {
            Region::Empty
        }
    }

    pub fn rect(lo: Point<T>, hi: Point<T>) -> Self {
        if lo.x < hi.x && lo.y < hi.y {
            Region::Rect { lo, hi }
        } else {
            Region::Empty
        }
    }

    /// The open unit square `(0,1)^2`.
    pub fn unit_box() -> Self {
        Region::rect(Point::origin(), Point::new(T::one(), T::one()))
    }

    pub fn unit_disk() -> Self {
        Region::disk(Point::origin(), T::one())
    }

    /// `{p : normal . p < offset}`; the normal is normalised here.
    pub fn half_plane(normal: Point<T>, offset: T) -> Self {
        let n = normal.norm();
        Region::HalfPlane { normal: normal * n.recip(), offset: offset / n }
    }

    /// Open sector of a disk between the angles `theta0` and `theta0 + sweep`.
    pub fn sector(center: Point<T>, radius: T, theta0: T, sweep: T) -> Self {
        let disk = Region::disk(center, radius);
        disk.intersect(Region::wedge(center, theta0, sweep))
    }

    /// Open cone with apex `center` between the angles `theta0` and `theta0 + sweep`.
    pub fn wedge(center: Point<T>, theta0: T, sweep: T) -> Self {
        let two_pi = T::PI() + T::PI();
        if sweep >= two_pi {
            // Full turn; bounded only after intersecting with something else.
            return Region::half_plane(Point::new(T::one(), T::zero()), T::infinity());
        }
        let u0 = Point::polar(theta0);
        let u1 = Point::polar(theta0 + sweep);
        let n0 = Point::new(u0.y, -u0.x);
        let n1 = Point::new(-u1.y, u1.x);
        let h0 = Region::half_plane(n0, n0.dot(center));
        let h1 = Region::half_plane(n1, n1.dot(center));
        if sweep <= T::PI() {
            h0.intersect(h1)
        } else {
            h0.union(h1)
        }
    }

    /// The quarter disk `B(0,1/2)` intersected with the closed first quadrant.
    pub fn quarter_disk() -> Self {
        let half = lit::<T>(0.5);
        Region::disk(Point::origin(), half).intersect(Region::rect(
            Point::origin(),
            Point::new(T::one(), T::one()),
        ))
    }

    pub fn union(self, o: Self) -> Self {
        match (&self, &o) {
            (Region::Empty, _) => o,
            (_, Region::Empty) => self,
            _ => Region::Union(Box::new(self), Box::new(o)),
        }
    }

    pub fn intersect(self, o: Self) -> Self {
        match (&self, &o) {
            (Region::Empty, _) | (_, Region::Empty) => Region::Empty,
            _ => Region::Intersection(Box::new(self), Box::new(o)),
        }
    }

    pub fn minus(self, o: Self) -> Self {
        match (&self, &o) {
            (Region::Empty, _) => Region::Empty,
            (_, Region::Empty) => self,
            _ => Region::Difference(Box::new(self), Box::new(o)),
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, Region::Disk { .. } | Region::Rect { .. } | Region::HalfPlane { .. })
    }

    /// Exact membership in the open set.
    pub fn contains(&self, p: Point<T>) -> bool {
        match self {
            Region::Empty => false,
            Region::Disk { center, radius } => (p - *center).norm2() < *radius * *radius,
            Region::Rect { lo, hi } => lo.x < p.x && p.x < hi.x && lo.y < p.y && p.y < hi.y,
            Region::HalfPlane { normal, offset } => normal.dot(p) < *offset,
            Region::Union(a, b) => a.contains(p) || b.contains(p),
            Region::Intersection(a, b) => a.contains(p) && b.contains(p),
            Region::Difference(a, b) => a.contains(p) && !b.contains(p),
        }
    }

    /// Section of the region by the vertical line through `x`.
    pub fn section(&self, x: T) -> Intervals<T> {
        match self {
            Region::Empty => Intervals::empty(),
            Region::Disk { center, radius } => {
                let dx = x - center.x;
                let h2 = *radius * *radius - dx * dx;
                if h2 > T::zero() {
                    let h = h2.sqrt();
                    Intervals::single(center.y - h, center.y + h)
                } else {
                    Intervals::empty()
                }
            }
            Region::Rect { lo, hi } => {
                if lo.x < x && x < hi.x {
                    Intervals::single(lo.y, hi.y)
                } else {
                    Intervals::empty()
                }
            }
            Region::HalfPlane { normal, offset } => {
                let rhs = *offset - normal.x * x;
                if normal.y > T::zero() {
                    Intervals::single(T::neg_infinity(), rhs / normal.y)
                } else if normal.y < T::zero() {
                    Intervals::single(rhs / normal.y, T::infinity())
                } else if rhs > T::zero() {
                    Intervals::full()
                } else {
                    Intervals::empty()
                }
            }
            Region::Union(a, b) => a.section(x).union(&b.section(x)),
            Region::Intersection(a, b) => {
                let sa = a.section(x);
                if sa.is_empty() {
                    sa
                } else {
                    sa.intersect(&b.section(x))
                }
            }
            Region::Difference(a, b) => {
                let sa = a.section(x);
                if sa.is_empty() {
                    sa
                } else {
                    sa.minus(&b.section(x))
                }
            }
        }
    }

    /// Conservative bounding box; `None` for sets that are empty by construction.
    pub fn bbox(&self) -> Option<BBox<T>> {
        let inf = T::infinity();
        match self {
            Region::Empty => None,
            Region::Disk { center, radius } => Some(BBox {
                lo: Point::new(center.x - *radius, center.y - *radius),
                hi: Point::new(center.x + *radius, center.y + *radius),
            }),
            Region::Rect { lo, hi } => Some(BBox { lo: *lo, hi: *hi }),
            Region::HalfPlane { normal, offset } => {
                let mut b = BBox { lo: Point::new(-inf, -inf), hi: Point::new(inf, inf) };
                if normal.y == T::zero() {
                    if normal.x > T::zero() {
                        b.hi.x = *offset / normal.x;
                    } else {
                        b.lo.x = *offset / normal.x;
                    }
                } else if normal.x == T::zero() {
                    if normal.y > T::zero() {
                        b.hi.y = *offset / normal.y;
                    } else {
                        b.lo.y = *offset / normal.y;
                    }
                }
                if offset.is_infinite() {
                    b = BBox { lo: Point::new(-inf, -inf), hi: Point::new(inf, inf) };
                }
                Some(b)
            }
            Region::Union(a, b) => match (a.bbox(), b.bbox()) {
                (Some(x), Some(y)) => Some(x.union(&y)),
                (x, None) => x,
                (None, y) => y,
            },
            Region::Intersection(a, b) => match (a.bbox(), b.bbox()) {
                (Some(x), Some(y)) => x.intersect(&y),
                _ => None,
            },
            Region::Difference(a, _) => a.bbox(),
        }
    }

    /// Bounding box of a bounded, nonempty region.
    pub fn bounded_bbox(&self) -> Result<Option<BBox<T>>, GeomError> {
        match self.bbox() {
            None => Ok(None),
            Some(b) if b.is_bounded() => Ok(Some(b)),
            Some(_) => Err(GeomError::Unbounded),
        }
    }

    fn collect_prims(&self, clip: &BBox<T>, out: &mut Vec<Prim<T>>) {
        match self {
            Region::Empty => {}
            Region::Disk { center, radius } => out.push(Prim::Circle { c: *center, r: *radius }),
            Region::Rect { lo, hi } => {
                let c = [*lo, Point::new(hi.x, lo.y), *hi, Point::new(lo.x, hi.y)];
                let normals = [
                    Point::new(T::zero(), -T::one()),
                    Point::new(T::one(), T::zero()),
                    Point::new(T::zero(), T::one()),
                    Point::new(-T::one(), T::zero()),
                ];
                for i in 0..4 {
                    out.push(Prim::Seg { a: c[i], b: c[(i + 1) % 4], normal: normals[i] });
                }
            }
            Region::HalfPlane { normal, offset } => {
                if let Some((a, b)) = clip_line(*normal, *offset, clip) {
                    out.push(Prim::Seg { a, b, normal: *normal });
                }
            }
            Region::Union(a, b) | Region::Intersection(a, b) | Region::Difference(a, b) => {
                a.collect_prims(clip, out);
                b.collect_prims(clip, out);
            }
        }
    }

    /// Primitive boundary curves, half-plane lines clipped to a margin around the bounding box.
    pub(crate) fn prims(&self, clip: &BBox<T>) -> Vec<Prim<T>> {
        let mut out = Vec::new();
        self.collect_prims(clip, &mut out);
        out
    }

    /// Abscissae where the topology or smoothness of the vertical sections can change.
    pub(crate) fn x_breakpoints(&self, bb: &BBox<T>) -> Vec<T> {
        let clip = bb.expand(bb.diameter() * lit(0.1) + lit(1e-9));
        let prims = self.prims(&clip);
        let mut xs = vec![bb.lo.x, bb.hi.x];
        for p in &prims {
            match *p {
                Prim::Circle { c, r } => {
                    xs.push(c.x - r);
                    xs.push(c.x + r);
                }
                Prim::Seg { a, b, .. } => {
                    xs.push(a.x);
                    xs.push(b.x);
                }
            }
        }
        for i in 0..prims.len() {
            for j in (i + 1)..prims.len() {
                for (_, _, q) in intersect_prims(&prims[i], &prims[j]) {
                    xs.push(q.x);
                }
            }
        }
        let mut xs: Vec<T> = xs
            .into_iter()
            .filter(|x| x.is_finite() && *x >= bb.lo.x && *x <= bb.hi.x)
            .collect();
        sort_dedup(&mut xs, bb.diameter() * lit(1e-13));
        xs
    }

    /// Checks boundedness and that operand boundaries only cross transversally.
    pub fn validate(&self) -> Result<(), GeomError> {
        validate_inner(self)
    }
}

fn validate_inner<T: Scalar>(r: &Region<T>) -> Result<(), GeomError> {
    let bb = match r.bounded_bbox()? {
        Some(b) => b,
        None => return Ok(()),
    };
    check_primitive_sanity(r)?;
    let scale = bb.diameter().max(T::one());
    let eps = scale * lit(1e-9);
    let clip = bb.expand(bb.diameter() * lit(0.1) + lit(1e-9));
    let prims = r.prims(&clip);
    for i in 0..prims.len() {
        for j in (i + 1)..prims.len() {
            if let Some(p) = tangency(&prims[i], &prims[j], eps) {
                // Contacts outside the closure of the region are harmless.
                if p.x >= bb.lo.x - eps && p.x <= bb.hi.x + eps && p.y >= bb.lo.y - eps && p.y <= bb.hi.y + eps {
                    return Err(GeomError::TangentialContact {
                        x: p.x.to_f64().unwrap_or(f64::NAN),
                        y: p.y.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
    }
    Ok(())
}

fn check_primitive_sanity<T: Scalar>(r: &Region<T>) -> Result<(), GeomError> {
    match r {
        Region::Disk { center, radius } if !(center.is_finite() && radius.is_finite()) => {
            Err(GeomError::Degenerate("disk with non-finite data".into()))
        }
        Region::Rect { lo, hi } if !(lo.is_finite() && hi.is_finite()) => {
            Err(GeomError::Degenerate("box with non-finite corners".into()))
        }
        Region::Union(a, b) | Region::Intersection(a, b) | Region::Difference(a, b) => {
            check_primitive_sanity(a)?;
            check_primitive_sanity(b)
        }
        _ => Ok(()),
    }
}

pub(crate) fn sort_dedup<T: Scalar>(xs: &mut Vec<T>, eps: T) {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    xs.dedup_by(|b, a| (*b - *a).abs() <= eps);
}

fn clip_line<T: Scalar>(n: Point<T>, off: T, b: &BBox<T>) -> Option<(Point<T>, Point<T>)> {
    if !off.is_finite() {
        return None;
    }
    let p0 = n * off;
    let d = n.perp();
    let mut t0 = T::neg_infinity();
    let mut t1 = T::infinity();
    for (pc, dc, lo, hi) in [(p0.x, d.x, b.lo.x, b.hi.x), (p0.y, d.y, b.lo.y, b.hi.y)] {
        if dc.abs() <= T::epsilon() {
            if pc < lo || pc > hi {
                return None;
            }
        } else {
            let (mut a, mut c) = ((lo - pc) / dc, (hi - pc) / dc);
            if a > c {
                std::mem::swap(&mut a, &mut c);
            }
            t0 = t0.max(a);
            t1 = t1.min(c);
        }
    }
    (t0 < t1).then(|| (p0 + d * t0, p0 + d * t1))
}

pub(crate) fn norm_angle<T: Scalar>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut a = a % two_pi;
    if a < T::zero() {
        a += two_pi;
    }
    if a >= two_pi {
        a -= two_pi;
    }
    a
}

/// Crossing points of two primitive boundaries as (parameter on `p`, parameter on `q`, point).
///
/// Segment parameters lie in `[0,1]`, circle parameters are angles in `[0, 2pi)`.
pub(crate) fn intersect_prims<T: Scalar>(p: &Prim<T>, q: &Prim<T>) -> Vec<(T, T, Point<T>)> {
    let slack = lit::<T>(1e-12);
    match (*p, *q) {
        (Prim::Seg { a: a1, b: b1, .. }, Prim::Seg { a: a2, b: b2, .. }) => {
            let d1 = b1 - a1;
            let d2 = b2 - a2;
            let den = d1.cross(d2);
            if den.abs() <= lit::<T>(1e-14) * d1.norm() * d2.norm() {
                return vec![];
            }
            let w = a2 - a1;
            let t = w.cross(d2) / den;
            let u = w.cross(d1) / den;
            if t >= -slack && t <= T::one() + slack && u >= -slack && u <= T::one() + slack {
                let t = t.max(T::zero()).min(T::one());
                let u = u.max(T::zero()).min(T::one());
                vec![(t, u, a1 + d1 * t)]
            } else {
                vec![]
            }
        }
        (Prim::Seg { a, b, .. }, Prim::Circle { c, r }) => seg_circle(a, b, c, r, slack)
            .into_iter()
            .map(|(t, th, x)| (t, th, x))
            .collect(),
        (Prim::Circle { c, r }, Prim::Seg { a, b, .. }) => seg_circle(a, b, c, r, slack)
            .into_iter()
            .map(|(t, th, x)| (th, t, x))
            .collect(),
        (Prim::Circle { c: c1, r: r1 }, Prim::Circle { c: c2, r: r2 }) => {
            let dv = c2 - c1;
            let d = dv.norm();
            if d <= T::zero() || d > r1 + r2 || d < (r1 - r2).abs() {
                return vec![];
            }
            let a = (r1 * r1 - r2 * r2 + d * d) / (lit::<T>(2.0) * d);
            let h = (r1 * r1 - a * a).max(T::zero()).sqrt();
            let u = dv * d.recip();
            let pm = c1 + u * a;
            let mut out = Vec::new();
            let pts = if h > T::zero() { vec![pm + u.perp() * h, pm - u.perp() * h] } else { vec![pm] };
            for x in pts {
                out.push((norm_angle((x - c1).angle()), norm_angle((x - c2).angle()), x));
            }
            out
        }
    }
}

fn seg_circle<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, r: T, slack: T) -> Vec<(T, T, Point<T>)> {
    let d = b - a;
    let f = a - c;
    let qa = d.dot(d);
    let qb = lit::<T>(2.0) * f.dot(d);
    let qc = f.dot(f) - r * r;
    let disc = qb * qb - lit::<T>(4.0) * qa * qc;
    if disc < T::zero() || qa <= T::zero() {
        return vec![];
    }
    let s = disc.sqrt();
    let mut ts = vec![(-qb - s) / (lit::<T>(2.0) * qa)];
    if s > T::zero() {
        ts.push((-qb + s) / (lit::<T>(2.0) * qa));
    }
    ts.into_iter()
        .filter(|t| *t >= -slack && *t <= T::one() + slack)
        .map(|t| {
            let t = t.max(T::zero()).min(T::one());
            let x = a + d * t;
            (t, norm_angle((x - c).angle()), x)
        })
        .collect()
}

/// Returns a contact point if the two boundaries touch without crossing or overlap.
fn tangency<T: Scalar>(p: &Prim<T>, q: &Prim<T>, eps: T) -> Option<Point<T>> {
    match (*p, *q) {
        (Prim::Circle { c: c1, r: r1 }, Prim::Circle { c: c2, r: r2 }) => {
            let d = c1.dist(c2);
            if d <= eps && (r1 - r2).abs() <= eps {
                return Some(c1 + Point::new(r1, T::zero()));
            }
            if d > eps && ((d - (r1 + r2)).abs() <= eps || (d - (r1 - r2).abs()).abs() <= eps) {
                let u = (c2 - c1) * d.recip();
                let s = if (d - (r1 + r2)).abs() <= eps || r1 > r2 { r1 } else { -r1 };
                return Some(c1 + u * s);
            }
            None
        }
        (Prim::Seg { a, b, .. }, Prim::Circle { c, r }) | (Prim::Circle { c, r }, Prim::Seg { a, b, .. }) => {
            let d = b - a;
            let len2 = d.norm2();
            let t = ((c - a).dot(d) / len2).max(T::zero()).min(T::one());
            let foot = a + d * t;
            let t_open = t > T::zero() && t < T::one();
            if t_open && (foot.dist(c) - r).abs() <= eps {
                Some(foot)
            } else {
                None
            }
        }
        (Prim::Seg { a: a1, b: b1, .. }, Prim::Seg { a: a2, b: b2, .. }) => {
            let d1 = b1 - a1;
            let l1 = d1.norm();
            let u = d1 * l1.recip();
            let off2a = u.cross(a2 - a1).abs();
            let off2b = u.cross(b2 - a1).abs();
            if off2a > eps || off2b > eps {
                return None;
            }
            let s0 = u.dot(a2 - a1);
            let s1 = u.dot(b2 - a1);
            let lo = s0.min(s1).max(T::zero());
            let hi = s0.max(s1).min(l1);
            if hi - lo > eps {
                Some(a1 + u * ((lo + hi) * lit(0.5)))
            } else {
                None
            }
        }
    }
}

/// Convenience constant for tests and fixtures.
pub const FULL_TURN: f64 = 2.0 * PI;
