use crate::geometry::point::Point;
use crate::geometry::region::{intersect_prims, norm_angle, BBox, GeomError, Prim, Region};
use crate::scalar::{lit, Scalar};

/// One smooth piece of a reduced boundary, carrying its outward unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece<T> {
    Segment { a: Point<T>, b: Point<T>, normal: Point<T> },
    /// Arc from angle `start` counter-clockwise through `sweep`.
    /// The outward normal is radial, pointing away from the centre iff `outward`.
    Arc { center: Point<T>, radius: T, start: T, sweep: T, outward: bool },
}

impl<T: Scalar> Piece<T> {
    pub fn length(&self) -> T {
        match *self {
            Piece::Segment { a, b, .. } => a.dist(b),
            Piece::Arc { radius, sweep, .. } => radius * sweep,
        }
    }

    /// Point at arc length `s` from the start.
    pub fn point_at(&self, s: T) -> Point<T> {
        match *self {
            Piece::Segment { a, b, .. } => {
                let l = a.dist(b);
                a + (b - a) * (s / l)
            }
            Piece::Arc { center, radius, start, .. } => center + Point::polar(start + s / radius) * radius,
        }
    }

    pub fn normal_at(&self, s: T) -> Point<T> {
        match *self {
            Piece::Segment { normal, .. } => normal,
            Piece::Arc { radius, start, outward, .. } => {
                let u = Point::polar(start + s / radius);
                if outward {
                    u
                } else {
                    -u
                }
            }
        }
    }

    pub fn start_point(&self) -> Point<T> {
        self.point_at(T::zero())
    }

    pub fn end_point(&self) -> Point<T> {
        self.point_at(self.length())
    }

    pub fn midpoint(&self) -> Point<T> {
        self.point_at(self.length() * lit(0.5))
    }

    /// Nearest point of the closed piece and its arc-length parameter.
    pub fn nearest(&self, p: Point<T>) -> (Point<T>, T) {
        match *self {
            Piece::Segment { a, b, .. } => {
                let d = b - a;
                let l2 = d.norm2();
                let t = ((p - a).dot(d) / l2).max(T::zero()).min(T::one());
                (a + d * t, t * l2.sqrt())
            }
            Piece::Arc { center, radius, start, sweep, .. } => {
                let v = p - center;
                let rel = norm_angle(v.angle() - start);
                if v.norm2() > T::zero() && rel <= sweep {
                    (center + Point::polar(start + rel) * radius, rel * radius)
                } else {
                    let (e0, e1) = (self.start_point(), self.end_point());
                    if p.dist(e0) <= p.dist(e1) {
                        (e0, T::zero())
                    } else {
                        (e1, self.length())
                    }
                }
            }
        }
    }

    pub fn distance(&self, p: Point<T>) -> T {
        self.nearest(p).0.dist(p)
    }

    /// Arc-length sub-intervals of the piece lying inside the open disk `B(x, eps)`.
    pub fn clip_to_disk(&self, x: Point<T>, eps: T) -> Vec<(T, T)> {
        match *self {
            Piece::Segment { a, b, .. } => {
                let l = a.dist(b);
                let u = (b - a) * l.recip();
                let w = x - a;
                let s0 = w.dot(u);
                let h2 = eps * eps - (w.norm2() - s0 * s0);
                if h2 <= T::zero() {
                    return vec![];
                }
                let h = h2.sqrt();
                let lo = (s0 - h).max(T::zero());
                let hi = (s0 + h).min(l);
                if lo < hi {
                    vec![(lo, hi)]
                } else {
                    vec![]
                }
            }
            Piece::Arc { center, radius, start, sweep, .. } => {
                let v = x - center;
                let d = v.norm();
                // Points of the circle within eps of x have angular distance < alpha from x's angle.
                if d + radius <= eps {
                    return vec![(T::zero(), radius * sweep)];
                }
                if d <= T::zero() || (d - radius).abs() >= eps {
                    return vec![];
                }
                let c = (radius * radius + d * d - eps * eps) / (lit::<T>(2.0) * radius * d);
                if c <= -T::one() {
                    return vec![(T::zero(), radius * sweep)];
                }
                let alpha = c.min(T::one()).acos();
                let two_pi = T::PI() + T::PI();
                let mid = norm_angle(v.angle() - start);
                let mut out = Vec::new();
                // The window [mid - alpha, mid + alpha] may wrap around; test the shifted copies.
                for shift in [-two_pi, T::zero(), two_pi] {
                    let lo = (mid - alpha + shift).max(T::zero());
                    let hi = (mid + alpha + shift).min(sweep);
                    if lo < hi {
                        out.push((lo * radius, hi * radius));
                    }
                }
                out
            }
        }
    }
}

/// Reduced boundary of a region as a list of smooth pieces plus the corner points between them.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve<T> {
    pub pieces: Vec<Piece<T>>,
    pub corners: Vec<Point<T>>,
}

impl<T: Scalar> BoundaryCurve<T> {
    pub fn length(&self) -> T {
        self.pieces.iter().fold(T::zero(), |s, p| s + p.length())
    }

    /// Unsigned distance to the closure of the curve and the nearest point.
    pub fn nearest(&self, p: Point<T>) -> Option<(T, Point<T>)> {
        let mut best: Option<(T, Point<T>)> = None;
        for pc in &self.pieces {
            let (q, _) = pc.nearest(p);
            let d = q.dist(p);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, q));
            }
        }
        best
    }
}

fn prim_param_span<T: Scalar>(p: &Prim<T>) -> T {
    match p {
        Prim::Seg { .. } => T::one(),
        Prim::Circle { .. } => T::PI() + T::PI(),
    }
}

fn sub_piece<T: Scalar>(p: &Prim<T>, t0: T, t1: T) -> Piece<T> {
    match *p {
        Prim::Seg { a, b, normal } => Piece::Segment { a: a + (b - a) * t0, b: a + (b - a) * t1, normal },
        Prim::Circle { c, r } => Piece::Arc { center: c, radius: r, start: t0, sweep: t1 - t0, outward: true },
    }
}

fn flip<T: Scalar>(p: Piece<T>) -> Piece<T> {
    match p {
        Piece::Segment { a, b, normal } => Piece::Segment { a, b, normal: -normal },
        Piece::Arc { center, radius, start, sweep, outward } => Piece::Arc { center, radius, start, sweep, outward: !outward },
    }
}

/// Reduced boundary of `r`, optionally restricted to the open `window`.
///
/// Every primitive boundary is cut at its crossings with all other primitive boundaries
/// (of `r` and of the window); a cut piece belongs to the reduced boundary iff membership
/// differs on its two sides.
pub fn reduced_boundary<T: Scalar>(r: &Region<T>, window: Option<&Region<T>>) -> Result<BoundaryCurve<T>, GeomError> {
    boundary_pieces(r, window, true)
}

/// Reduced boundary of `r` cut at every crossing with the boundary of `cutter`, unfiltered,
/// so each piece lies entirely inside, on, or outside `cutter`.
pub fn reduced_boundary_cut<T: Scalar>(r: &Region<T>, cutter: &Region<T>) -> Result<BoundaryCurve<T>, GeomError> {
    boundary_pieces(r, Some(cutter), false)
}

fn boundary_pieces<T: Scalar>(
    r: &Region<T>,
    window: Option<&Region<T>>,
    filter: bool,
) -> Result<BoundaryCurve<T>, GeomError> {
    let bb = match r.bounded_bbox()? {
        Some(b) => b,
        None => return Ok(BoundaryCurve { pieces: vec![], corners: vec![] }),
    };
    let scale = bb.diameter().max(lit(1e-300));
    let clip: BBox<T> = bb.expand(scale * lit(0.1) + lit(1e-9));
    let own = r.prims(&clip);
    let mut cutters = own.clone();
    if let Some(w) = window {
        cutters.extend(w.prims(&clip));
    }
    let eps_len = scale * lit(1e-10);
    let mut pieces: Vec<Piece<T>> = Vec::new();
    for (i, p) in own.iter().enumerate() {
        let mut ts: Vec<T> = Vec::new();
        for (j, q) in cutters.iter().enumerate() {
            if i == j {
                continue;
            }
            for (t, _, _) in intersect_prims(p, q) {
                ts.push(t);
            }
        }
        let span = prim_param_span(p);
        let closed = matches!(p, Prim::Circle { .. });
        let mut cuts: Vec<(T, T)> = Vec::new();
        ts.retain(|t| *t >= T::zero() && *t <= span);
        crate::geometry::region::sort_dedup(&mut ts, lit(1e-13));
        if closed {
            if ts.is_empty() {
                cuts.push((T::zero(), span));
            } else {
                for k in 0..ts.len() {
                    let t0 = ts[k];
                    let t1 = if k + 1 < ts.len() { ts[k + 1] } else { ts[0] + span };
                    cuts.push((t0, t1));
                }
            }
        } else {
            let mut all = vec![T::zero()];
            all.extend(ts.iter().copied().filter(|t| *t > T::zero() && *t < T::one()));
            all.push(T::one());
            for k in 0..all.len() - 1 {
                cuts.push((all[k], all[k + 1]));
            }
        }
        for (t0, t1) in cuts {
            let cand = sub_piece(p, t0, t1);
            let len = cand.length();
            if len <= eps_len {
                continue;
            }
            let m = cand.midpoint();
            let n = cand.normal_at(len * lit(0.5));
            let h = (scale * lit(1e-9)).min(len * lit(1e-3));
            let inside = r.contains(m - n * h);
            let outside = r.contains(m + n * h);
            if inside == outside {
                continue;
            }
            if let (Some(w), true) = (window, filter) {
                if !w.contains(m) {
                    continue;
                }
            }
            let cand = if inside { cand } else { flip(cand) };
            let nn = cand.normal_at(len * lit(0.5));
            let dup = pieces.iter().any(|q| {
                let (_, s) = q.nearest(m);
                q.distance(m) <= scale * lit(1e-9) && (q.normal_at(s) - nn).norm() < lit(1e-6)
            });
            if !dup {
                pieces.push(cand);
            }
        }
    }
    let corners = find_corners(&pieces, scale);
    Ok(BoundaryCurve { pieces, corners })
}

fn find_corners<T: Scalar>(pieces: &[Piece<T>], scale: T) -> Vec<Point<T>> {
    let tol = scale * lit(1e-8);
    let mut ends: Vec<(Point<T>, Point<T>)> = Vec::new();
    for p in pieces {
        let closed = matches!(p, Piece::Arc { sweep, .. } if *sweep >= T::PI() + T::PI() - lit(1e-12));
        if closed {
            continue;
        }
        let l = p.length();
        ends.push((p.start_point(), p.normal_at(T::zero())));
        ends.push((p.end_point(), p.normal_at(l)));
    }
    let mut corners: Vec<Point<T>> = Vec::new();
    for i in 0..ends.len() {
        for j in (i + 1)..ends.len() {
            let (pi, ni) = ends[i];
            let (pj, nj) = ends[j];
            if pi.dist(pj) <= tol && (ni - nj).norm() > lit(1e-7) && !corners.iter().any(|c| c.dist(pi) <= tol) {
                corners.push(pi);
            }
        }
    }
    corners
}

/// Total length of the reduced boundary inside the optional window.
pub fn perimeter<T: Scalar>(r: &Region<T>, window: Option<&Region<T>>) -> Result<T, GeomError> {
    Ok(reduced_boundary(r, window)?.length())
}

/// Signed distance value; `exact` is false only when the value is a min/max bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedDistance<T> {
    pub value: T,
    pub exact: bool,
}

/// Exact signed distance (negative inside) backed by a cached reduced boundary.
#[derive(Clone, Debug)]
pub struct DistanceField<T> {
    pub region: Region<T>,
    pub boundary: BoundaryCurve<T>,
}

impl<T: Scalar> DistanceField<T> {
    pub fn new(region: &Region<T>) -> Result<Self, GeomError> {
        Ok(DistanceField { region: region.clone(), boundary: reduced_boundary(region, None)? })
    }

    /// Distance to the boundary (unsigned) with the nearest boundary point.
    pub fn boundary_distance(&self, p: Point<T>) -> (T, Point<T>) {
        self.boundary.nearest(p).unwrap_or((T::infinity(), p))
    }

    pub fn signed(&self, p: Point<T>) -> T {
        let (d, _) = self.boundary_distance(p);
        if self.region.contains(p) {
            -d
        } else {
            d
        }
    }

    /// Distance to the region (zero inside).
    pub fn outside(&self, p: Point<T>) -> T {
        self.signed(p).max(T::zero())
    }

    /// Distance to the complement (zero outside).
    pub fn inside(&self, p: Point<T>) -> T {
        (-self.signed(p)).max(T::zero())
    }

    /// Unit gradient of the unsigned boundary distance, pointing away from the nearest boundary point.
    pub fn boundary_distance_gradient(&self, p: Point<T>) -> Point<T> {
        let (d, q) = self.boundary_distance(p);
        if d > T::zero() {
            (p - q) * d.recip()
        } else {
            Point::origin()
        }
    }
}

/// Signed distance from `p` to the boundary of `r`, negative inside.
pub fn signed_distance<T: Scalar>(r: &Region<T>, p: Point<T>) -> Result<SignedDistance<T>, GeomError> {
    let value = match r {
        Region::Disk { center, radius } => p.dist(*center) - *radius,
        Region::Rect { lo, hi } => {
            let dx = (lo.x - p.x).max(p.x - hi.x);
            let dy = (lo.y - p.y).max(p.y - hi.y);
            if dx <= T::zero() && dy <= T::zero() {
                dx.max(dy)
            } else {
                dx.max(T::zero()).hypot(dy.max(T::zero()))
            }
        }
        Region::HalfPlane { normal, offset } => normal.dot(p) - *offset,
        Region::Empty => T::infinity(),
        _ => DistanceField::new(r)?.signed(p),
    };
    Ok(SignedDistance { value, exact: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point<f64>;

    #[test]
    fn arc_clip_finds_window() {
        let arc = Piece::Arc { center: P::origin(), radius: 1.0, start: 0.0, sweep: std::f64::consts::TAU, outward: true };
        let w = arc.clip_to_disk(P::new(1.0, 0.0), 0.1);
        let total: f64 = w.iter().map(|(a, b)| b - a).sum();
        // chord 0.1 corresponds to angle 2 asin(0.05) on each side
        assert!((total - 4.0 * (0.05f64).asin()).abs() < 1e-12, "{total}");
    }

    #[test]
    fn segment_nearest_clamps() {
        let s = Piece::Segment { a: P::new(0.0, 0.0), b: P::new(1.0, 0.0), normal: P::new(0.0, -1.0) };
        assert_eq!(s.nearest(P::new(2.0, 1.0)).0, P::new(1.0, 0.0));
        assert!((s.distance(P::new(0.5, 0.25)) - 0.25).abs() < 1e-15);
    }
}
