//! Lipschitz estimates on compact sets and normal trace functionals for fields in `DM^1`.
//!
//! The trace of an integrable field acts on Lipschitz scalars through
//! `N(f) = integral_Omega f d(div F) + integral_Omega F . Df`. Shell limits against ramps
//! that vanish on a line or on the boundary expose the part of the trace that only sees `Df`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fields::{dm_norm, integrate_against_with, tube, DMField, FieldError, Integrability};
use crate::geometry::{neighborhood, reduced_boundary, DistanceField, GeomError, Piece, Side};
use crate::normal::corner_lines;
use crate::quad::{integrate_curve, integrate_region, LimitStatus, LimitTracker, QuadError, RegionOptions, SingularLine, Tol};
use crate::{BoundaryCurve, LimitResult, Point, Region, ScaleSchedule};

/// Tolerance on trace identities (boundary-zero nullity, extension independence, bounds).
pub const TRACE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("path-connected set required: found {components} components")]
    NotPathConnected { components: usize },
    #[error("cover radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("empty compact set")]
    EmptySet,
    #[error("trace integral diverges: field is not in DM^1 on this region ({0})")]
    Diverging(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

fn quad_err(e: QuadError) -> TraceError {
    match e {
        QuadError::Diverging { x, y } => TraceError::Diverging(format!("near ({x}, {y})")),
        e => TraceError::Quad(e),
    }
}

fn field_err(e: FieldError) -> TraceError {
    match e {
        FieldError::Quad(q) => quad_err(q),
        e => TraceError::Field(e),
    }
}

type ValueFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// A Lipschitz scalar with closed-form gradient.
#[derive(Clone)]
pub struct Lipschitz {
    pub name: String,
    value: ValueFn,
    grad: GradFn,
    /// Bound on the operator norm of the Hessian where it exists; pads sampled suprema.
    pub hessian_bound: f64,
    /// Lines across which the gradient jumps.
    pub breaks: Vec<SingularLine<f64>>,
}

impl std::fmt::Debug for Lipschitz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lipschitz").field("name", &self.name).field("hessian_bound", &self.hessian_bound).finish()
    }
}

impl Lipschitz {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point) -> Point + Send + Sync + 'static,
        hessian_bound: f64,
    ) -> Self {
        Lipschitz { name: name.into(), value: Arc::new(value), grad: Arc::new(grad), hessian_bound, breaks: vec![] }
    }

    pub fn with_breaks(mut self, breaks: Vec<SingularLine<f64>>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn value(&self, p: Point) -> f64 {
        (self.value)(p)
    }

    pub fn grad(&self, p: Point) -> Point {
        (self.grad)(p)
    }

    pub fn constant(c: f64) -> Self {
        Lipschitz::new(format!("constant {c}"), move |_| c, |_| Point::origin(), 0.0)
    }

    /// `a . p + b`.
    pub fn linear(a: Point, b: f64) -> Self {
        Lipschitz::new(format!("linear ({}, {})", a.x, a.y), move |p| a.dot(p) + b, move |_| a, 0.0)
    }

    /// `min(1, dist(p, R^2 \ omega) / width)` inside `omega`, zero outside.
    pub fn boundary_ramp(omega: &Region, width: f64) -> Result<Self, TraceError> {
        let df = Arc::new(DistanceField::new(omega)?);
        let mut breaks = corner_lines(&df.boundary);
        if let Ok(inner) = neighborhood(omega, width, Side::Inner) {
            for pc in reduced_boundary(&inner, None)?.pieces {
                if let Piece::Segment { a, b, .. } = pc {
                    breaks.push(SingularLine { point: a, dir: (b - a).normalized() });
                }
            }
        }
        let (d1, d2) = (df.clone(), df);
        Ok(Lipschitz::new(
            format!("boundary ramp {width}"),
            move |p| (d1.inside(p) / width).min(1.0),
            move |p| {
                let d = d2.inside(p);
                if d > 0.0 && d < width {
                    d2.boundary_distance_gradient(p) * (1.0 / width)
                } else {
                    Point::origin()
                }
            },
            0.0,
        )
        .with_breaks(breaks))
    }

    /// `f + phi` with both gradients summed; Hessian bounds add.
    pub fn plus(&self, o: &Lipschitz) -> Self {
        let (a, b) = (self.clone(), o.clone());
        let (c, d) = (self.clone(), o.clone());
        let mut breaks = self.breaks.clone();
        breaks.extend(o.breaks.iter().copied());
        Lipschitz::new(
            format!("{} + {}", self.name, o.name),
            move |p| a.value(p) + b.value(p),
            move |p| c.grad(p) + d.grad(p),
            self.hessian_bound + o.hessian_bound,
        )
        .with_breaks(breaks)
    }
}

/// Smooth scalar fixtures with declared Hessian bounds, used for the Lipschitz lemma checks.
pub fn smooth_fixtures() -> Vec<Lipschitz> {
    vec![
        Lipschitz::linear(Point::new(2.0, -1.0), 0.5),
        Lipschitz::new("square", |p| p.x * p.x, |p| Point::new(2.0 * p.x, 0.0), 2.0),
        Lipschitz::new(
            "trig",
            |p| (2.0 * p.x).sin() * p.y.cos(),
            |p| Point::new(2.0 * (2.0 * p.x).cos() * p.y.cos(), -(2.0 * p.x).sin() * p.y.sin()),
            5.0,
        ),
        Lipschitz::new(
            "soft-norm",
            |p| (1.0 + p.norm2()).sqrt(),
            |p| p * (1.0 / (1.0 + p.norm2()).sqrt()),
            1.0,
        ),
        Lipschitz::new(
            "gaussian",
            |p| (-p.norm2()).exp(),
            |p| p * (-2.0 * (-p.norm2()).exp()),
            2.0,
        ),
    ]
}

/// `x(1-x) y(1-y)`, the bubble vanishing on the boundary of the unit box.
pub fn box_bubble() -> Lipschitz {
    Lipschitz::new(
        "bubble",
        |p| p.x * (1.0 - p.x) * p.y * (1.0 - p.y),
        |p| Point::new((1.0 - 2.0 * p.x) * p.y * (1.0 - p.y), p.x * (1.0 - p.x) * (1.0 - 2.0 * p.y)),
        1.0,
    )
}

/// Product of two Lipschitz scalars.
pub fn product(f: &Lipschitz, g: &Lipschitz, hessian_bound: f64) -> Lipschitz {
    let (a, b) = (f.clone(), g.clone());
    let (c, d) = (f.clone(), g.clone());
    let mut breaks = f.breaks.clone();
    breaks.extend(g.breaks.iter().copied());
    Lipschitz::new(
        format!("({}) ({})", f.name, g.name),
        move |p| a.value(p) * b.value(p),
        move |p| c.grad(p) * d.value(p) + d.grad(p) * c.value(p),
        hessian_bound,
    )
    .with_breaks(breaks)
}

/// A compact set: a finite union of curve pieces or the closure of a bounded region.
#[derive(Clone, Debug)]
pub enum CompactSet {
    Curve(BoundaryCurve),
    Region(Region),
}

enum SetDistance {
    Curve(BoundaryCurve),
    Region(DistanceField<f64>),
}

impl SetDistance {
    fn get(&self, p: Point) -> f64 {
        match self {
            SetDistance::Curve(c) => c.nearest(p).map_or(f64::INFINITY, |(d, _)| d),
            SetDistance::Region(df) => df.outside(p),
        }
    }
}

impl CompactSet {
    pub fn circle(center: Point, radius: f64) -> Self {
        CompactSet::Curve(BoundaryCurve {
            pieces: vec![Piece::Arc { center, radius, start: 0.0, sweep: 2.0 * PI, outward: true }],
            corners: vec![],
        })
    }

    pub fn segments(segs: &[(Point, Point)]) -> Self {
        let pieces = segs
            .iter()
            .map(|&(a, b)| Piece::Segment { a, b, normal: (b - a).normalized().perp() * -1.0 })
            .collect();
        CompactSet::Curve(BoundaryCurve { pieces, corners: vec![] })
    }

    /// Topological boundary of a bounded region.
    pub fn boundary_of(r: &Region) -> Result<Self, TraceError> {
        Ok(CompactSet::Curve(reduced_boundary(r, None)?))
    }

    fn distance(&self) -> Result<SetDistance, TraceError> {
        Ok(match self {
            CompactSet::Curve(c) => SetDistance::Curve(c.clone()),
            CompactSet::Region(r) => SetDistance::Region(DistanceField::new(r)?),
        })
    }

    fn bbox(&self) -> Result<(Point, Point), TraceError> {
        match self {
            CompactSet::Curve(c) => {
                let pts = curve_samples(c, c.length().max(1e-12) / 512.0);
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for p in pts {
                    lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
                    hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
                }
                if !lo.is_finite() {
                    return Err(TraceError::EmptySet);
                }
                Ok((lo, hi))
            }
            CompactSet::Region(r) => {
                let bb = r.bounded_bbox()?.ok_or(TraceError::EmptySet)?;
                Ok((bb.lo, bb.hi))
            }
        }
    }

    /// Points of the set with spacing about `h`: arc-length samples on curves, a grid plus
    /// boundary samples for regions.
    pub fn samples(&self, h: f64) -> Result<Vec<Point>, TraceError> {
        match self {
            CompactSet::Curve(c) => Ok(curve_samples(c, h)),
            CompactSet::Region(r) => {
                let (lo, hi) = self.bbox()?;
                let nx = ((hi.x - lo.x) / h).ceil() as usize;
                let ny = ((hi.y - lo.y) / h).ceil() as usize;
                let mut out = Vec::new();
                for i in 0..=nx {
                    for j in 0..=ny {
                        let p = Point::new(lo.x + i as f64 * h, lo.y + j as f64 * h);
                        if r.contains(p) {
                            out.push(p);
                        }
                    }
                }
                out.extend(curve_samples(&reduced_boundary(r, None)?, h));
                Ok(out)
            }
        }
    }

    /// Number of path components: union of pieces sharing points for curves, grid
    /// connectivity at spacing `h` for regions.
    pub fn components(&self, h: f64) -> Result<usize, TraceError> {
        match self {
            CompactSet::Curve(c) => {
                let n = c.pieces.len();
                if n == 0 {
                    return Err(TraceError::EmptySet);
                }
                let scale = c.length().max(1.0);
                let mut uf = UnionFind::new(n);
                for i in 0..n {
                    for j in i + 1..n {
                        if pieces_touch(&c.pieces[i], &c.pieces[j], 1e-9 * scale) {
                            uf.union(i, j);
                        }
                    }
                }
                Ok(uf.count())
            }
            CompactSet::Region(_) => {
                let pts = self.samples(h)?;
                if pts.is_empty() {
                    return Err(TraceError::EmptySet);
                }
                Ok(point_components(&pts, 1.5 * h))
            }
        }
    }
}

fn curve_samples(c: &BoundaryCurve, h: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for pc in &c.pieces {
        let l = pc.length();
        let n = (l / h).ceil().max(1.0) as usize;
        for i in 0..=n {
            out.push(pc.point_at(l * i as f64 / n as f64));
        }
    }
    out
}

fn pieces_touch(a: &Piece<f64>, b: &Piece<f64>, tol: f64) -> bool {
    let ends = |p: &Piece<f64>| [p.start_point(), p.end_point()];
    if ends(a).iter().any(|q| b.distance(*q) <= tol) || ends(b).iter().any(|q| a.distance(*q) <= tol) {
        return true;
    }
    // Interior crossings of two segments.
    if let (Piece::Segment { a: p, b: q, .. }, Piece::Segment { a: r, b: s, .. }) = (a, b) {
        let d1 = (*q - *p).cross(*r - *p);
        let d2 = (*q - *p).cross(*s - *p);
        let d3 = (*s - *r).cross(*p - *r);
        let d4 = (*s - *r).cross(*q - *r);
        return d1 * d2 < 0.0 && d3 * d4 < 0.0;
    }
    false
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Spatial hash of points in cells of side `cell`.
struct Grid {
    cell: f64,
    map: HashMap<(i64, i64), Vec<usize>>,
}

impl Grid {
    fn new(cell: f64) -> Self {
        Grid { cell, map: HashMap::new() }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    fn insert(&mut self, p: Point, i: usize) {
        self.map.entry(self.key(p)).or_default().push(i);
    }

    fn near(&self, p: Point) -> impl Iterator<Item = usize> + '_ {
        let (kx, ky) = self.key(p);
        (-1..=1).flat_map(move |dx| (-1..=1).map(move |dy| (kx + dx, ky + dy))).flat_map(move |k| {
            self.map.get(&k).into_iter().flatten().copied()
        })
    }
}

fn point_components(pts: &[Point], link: f64) -> usize {
    let mut grid = Grid::new(link);
    for (i, p) in pts.iter().enumerate() {
        grid.insert(*p, i);
    }
    let mut uf = UnionFind::new(pts.len());
    for (i, p) in pts.iter().enumerate() {
        let near: Vec<usize> = grid.near(*p).collect();
        for j in near {
            if j != i && pts[j].dist(*p) <= link {
                uf.union(i, j);
            }
        }
    }
    uf.count()
}

/// Greedy cover of a compact set by open balls of radius `delta` centred on the set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub delta: f64,
    pub m: usize,
    pub centers: Vec<Point>,
}

/// Greedy ball cover; rejects sets that are not path-connected.
///
/// Samples are taken at spacing `h = delta / 8` and a sample counts as covered only within
/// `delta - h` of a centre, so the balls cover the set between samples as well.
pub fn ball_cover(k: &CompactSet, delta: f64) -> Result<Cover, TraceError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(TraceError::BadRadius(delta));
    }
    let h = delta / 8.0;
    let components = k.components(h)?;
    if components != 1 {
        return Err(TraceError::NotPathConnected { components });
    }
    let reach = delta - h;
    let mut centers: Vec<Point> = Vec::new();
    let mut grid = Grid::new(delta);
    for p in k.samples(h)? {
        let covered = grid.near(p).any(|i| centers[i].dist(p) < reach);
        if !covered {
            grid.insert(p, centers.len());
            centers.push(p);
        }
    }
    Ok(Cover { delta, m: centers.len(), centers })
}

#[derive(Clone, Debug)]
pub struct LipschitzEstimate {
    pub set: CompactSet,
    pub delta: f64,
    /// Size of the cover by balls of radius `delta / 6`.
    pub m: usize,
    /// `2 (m + 2)`.
    pub c: f64,
    /// Padded supremum of `|Df|` over the open `delta`-neighbourhood of the set.
    pub grad_sup: f64,
    pub bound: f64,
    /// Largest difference quotient over sampled pairs of points of the set.
    pub quotient: f64,
    pub accepted: bool,
}

/// Supremum of `|Df|` over `{dist(., K) < delta}` by grid sampling, padded by the Hessian
/// bound times the grid spacing.
pub fn gradient_sup(f: &Lipschitz, k: &CompactSet, delta: f64) -> Result<f64, TraceError> {
    let (lo, hi) = k.bbox()?;
    let (lo, hi) = (lo - Point::new(delta, delta), hi + Point::new(delta, delta));
    let h = (delta / 16.0).max((hi.x - lo.x).max(hi.y - lo.y) / 400.0);
    let dist = k.distance()?;
    let nx = ((hi.x - lo.x) / h).ceil() as usize;
    let ny = ((hi.y - lo.y) / h).ceil() as usize;
    let mut sup: f64 = 0.0;
    for i in 0..=nx {
        for j in 0..=ny {
            let p = Point::new(lo.x + i as f64 * h, lo.y + j as f64 * h);
            if dist.get(p) < delta {
                sup = sup.max(f.grad(p).norm());
            }
        }
    }
    Ok(sup + f.hessian_bound * h)
}

/// Largest `|f(x) - f(y)| / |x - y|` over pairs of at most `max_points` samples of the set.
pub fn sampled_quotient(f: &Lipschitz, k: &CompactSet, max_points: usize) -> Result<f64, TraceError> {
    let (lo, hi) = k.bbox()?;
    let diam = lo.dist(hi).max(1e-12);
    let mut pts = k.samples(diam / 64.0)?;
    if pts.len() > max_points {
        let stride = pts.len().div_ceil(max_points);
        pts = pts.into_iter().step_by(stride).collect();
    }
    let vals: Vec<f64> = pts.iter().map(|p| f.value(*p)).collect();
    let mut q: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = pts[i].dist(pts[j]);
            if d > 1e-12 {
                q = q.max((vals[i] - vals[j]).abs() / d);
            }
        }
    }
    Ok(q)
}

/// Lipschitz bound on a path-connected compact set from the gradient on its neighbourhood.
pub fn lipschitz_bound(f: &Lipschitz, k: &CompactSet, delta: f64) -> Result<LipschitzEstimate, TraceError> {
    let cover = ball_cover(k, delta / 6.0)?;
    let c = 2.0 * (cover.m as f64 + 2.0);
    let grad_sup = gradient_sup(f, k, delta)?;
    let quotient = sampled_quotient(f, k, 400)?;
    let bound = c * grad_sup;
    Ok(LipschitzEstimate {
        set: k.clone(),
        delta,
        m: cover.m,
        c,
        grad_sup,
        bound,
        quotient,
        accepted: quotient <= bound + 1e-9,
    })
}

/// `sup |f| + sup |Df|` over the closure of `omega`, sampled on a grid with padding.
pub fn lc_norm(f: &Lipschitz, omega: &Region) -> Result<f64, TraceError> {
    let bb = omega.bounded_bbox()?.ok_or(TraceError::EmptySet)?;
    let h = (bb.hi.x - bb.lo.x).max(bb.hi.y - bb.lo.y) / 200.0;
    let mut pts = CompactSet::Region(omega.clone()).samples(h)?;
    pts.extend(CompactSet::boundary_of(omega)?.samples(h)?);
    let (mut fs, mut gs): (f64, f64) = (0.0, 0.0);
    for p in pts {
        fs = fs.max(f.value(p).abs());
        gs = gs.max(f.grad(p).norm());
    }
    Ok(fs + gs * h + gs + f.hessian_bound * h)
}

/// Value of the trace functional with the data of its norm bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceValue {
    pub value: f64,
    pub error: f64,
    pub status: LimitStatus,
    pub dm_norm: f64,
    pub lc_norm: f64,
    pub bound: f64,
    pub within_bound: bool,
}

fn trace_options(f: &DMField, g: &Lipschitz, extra: &[SingularLine<f64>]) -> RegionOptions<f64> {
    let mut lines = f.singular_lines.clone();
    lines.extend(g.breaks.iter().copied());
    lines.extend(extra.iter().copied());
    RegionOptions::default().with_points(&f.singular_points).with_lines(&lines).with_tol(1e-10, 1e-9)
}

/// `N(f) = integral_Omega f d(div F) + integral_Omega F . Df` with its norm bound.
pub fn silhavy_trace(field: &DMField, omega: &Region, f: &Lipschitz) -> Result<TraceValue, TraceError> {
    let opts = trace_options(field, f, &[]);
    let mut value = 0.0;
    let mut error = 0.0;
    if let Some(d) = &field.divergence.density {
        let e = integrate_region(&|p| [d(p) * f.value(p)], omega, &opts).map_err(quad_err)?;
        value += e.value[0];
        error += e.error;
    }
    for (a, w) in &field.divergence.atoms {
        if omega.contains(*a) {
            value += w * f.value(*a);
        }
    }
    for (c, rho) in &field.divergence.curves {
        let e = integrate_curve(
            &|p, _| [if omega.contains(p) { rho(p) * f.value(p) } else { 0.0 }],
            c,
            Tol::new(1e-11, 1e-10),
            &[],
        );
        value += e.value[0];
        error += e.error;
    }
    let sched = ScaleSchedule::default().with_tol(1e-7);
    let (g, gerr, status) =
        integrate_against_with(field, &|p| f.grad(p), omega, &sched, &opts).map_err(field_err)?;
    error += gerr;
    if status == LimitStatus::Diverging {
        return Err(TraceError::Diverging(format!("{} against {}", field.name(), f.name)));
    }
    value += g;
    let norm = dm_norm(field, omega, Integrability::L1).map_err(field_err)?;
    let lc = lc_norm(f, omega)?;
    let bound = norm * lc;
    Ok(TraceValue {
        value,
        error,
        status,
        dm_norm: norm,
        lc_norm: lc,
        bound,
        within_bound: value.abs() <= bound + TRACE_TOL,
    })
}

/// Ramps rising from zero to one across a layer of width `delta = 1/k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ramp {
    /// `min(1, k dist(p, line))`.
    Strip(SingularLine<f64>),
    /// `min(1, k dist(p, boundary of omega))`.
    Boundary,
}

impl Ramp {
    /// The strip ramp off the vertical axis used by both closing examples.
    pub fn axis() -> Self {
        Ramp::Strip(SingularLine { point: Point::origin(), dir: Point::new(0.0, 1.0) })
    }
}

/// Schedule `delta = 1/k` for `k = 10, 100, ..., 10^6`.
pub fn decade_schedule() -> ScaleSchedule {
    ScaleSchedule { initial: 0.1, ratio: 0.1, steps: 6, tol: 1e-4, cap: 1e9 }
}

struct Layer {
    region: Region,
    grad: Box<dyn Fn(Point) -> Point + Sync>,
    breaks: Vec<SingularLine<f64>>,
}

fn layer(omega: &Region, ramp: &Ramp, delta: f64, df: Option<&Arc<DistanceField<f64>>>) -> Result<Layer, TraceError> {
    match ramp {
        Ramp::Strip(l) => {
            let n = Point::new(-l.dir.y, l.dir.x).normalized();
            let p0 = l.point;
            Ok(Layer {
                region: omega.clone().intersect(tube(l, delta)),
                grad: Box::new(move |p| if n.dot(p - p0) >= 0.0 { n } else { -n }),
                breaks: vec![],
            })
        }
        Ramp::Boundary => {
            let df = df.expect("boundary ramp needs a distance field").clone();
            let region = match neighborhood(omega, delta, Side::Inner) {
                Ok(inner) => omega.clone().minus(inner),
                Err(GeomError::EmptyInner { .. }) => omega.clone(),
                Err(e) => return Err(e.into()),
            };
            let breaks = corner_lines(&df.boundary);
            Ok(Layer { region, grad: Box::new(move |p| df.boundary_distance_gradient(p)), breaks })
        }
    }
}

/// `integral_Omega f F . D g_k` for the ramp `g_k` at `delta = 1/k`, with its quadrature error.
pub fn shell_gradient_term(
    field: &DMField,
    omega: &Region,
    f: &Lipschitz,
    ramp: &Ramp,
    delta: f64,
) -> Result<f64, TraceError> {
    let df = match ramp {
        Ramp::Boundary => Some(Arc::new(DistanceField::new(omega)?)),
        Ramp::Strip(_) => None,
    };
    shell_term(field, omega, f, ramp, delta, df.as_ref())
}

fn shell_term(
    field: &DMField,
    omega: &Region,
    f: &Lipschitz,
    ramp: &Ramp,
    delta: f64,
    df: Option<&Arc<DistanceField<f64>>>,
) -> Result<f64, TraceError> {
    let l = layer(omega, ramp, delta, df)?;
    let opts = trace_options(field, f, &l.breaks);
    let k = 1.0 / delta;
    let sched = ScaleSchedule::default().with_tol(1e-9);
    let (v, _, status) =
        integrate_against_with(field, &|p| (l.grad)(p) * (k * f.value(p)), &l.region, &sched, &opts).map_err(field_err)?;
    if status == LimitStatus::Diverging {
        return Err(TraceError::Diverging(format!("{} on the ramp layer", field.name())));
    }
    Ok(v)
}

/// Limit of `integral_Omega f F . D g_k` along the schedule `delta = 1/k`.
///
/// For a bounded smooth field and the boundary ramp the limit is `-integral_{boundary} f F . n`,
/// since `g_k` vanishes on the boundary and tends to one inside.
pub fn shell_gradient_limit(
    field: &DMField,
    omega: &Region,
    f: &Lipschitz,
    ramp: &Ramp,
    schedule: &ScaleSchedule,
) -> Result<LimitResult, TraceError> {
    let df = match ramp {
        Ramp::Boundary => Some(Arc::new(DistanceField::new(omega)?)),
        Ramp::Strip(_) => None,
    };
    let mut tr = LimitTracker::new(*schedule);
    for i in 0..schedule.steps {
        let d = schedule.scale(i);
        let v = match shell_term(field, omega, f, ramp, d, df.as_ref()) {
            Ok(v) => v,
            Err(TraceError::Diverging(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if let Some(r) = tr.push(d, v) {
            return Ok(r);
        }
    }
    Ok(tr.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PurePart {
    RadonRepresentable,
    PureGradientPartRequired,
    Inconclusive,
}

impl PurePart {
    pub fn as_str(&self) -> &'static str {
        match self {
            PurePart::RadonRepresentable => "radon-representable",
            PurePart::PureGradientPartRequired => "pure-gradient-part-required",
            PurePart::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub class: PurePart,
    /// Values of `(1/delta) integral_{Omega \ Omega_delta} |F . D dist|` along the schedule.
    pub criterion: LimitResult,
    pub note: Option<String>,
}

/// `(1/delta) integral over the inner boundary layer of width delta of |F . D dist|`.
pub fn layer_criterion(field: &DMField, omega: &Region, delta: f64) -> Result<f64, TraceError> {
    let df = Arc::new(DistanceField::new(omega)?);
    criterion_term(field, omega, delta, &df)
}

fn criterion_term(field: &DMField, omega: &Region, delta: f64, df: &Arc<DistanceField<f64>>) -> Result<f64, TraceError> {
    let l = layer(omega, &Ramp::Boundary, delta, Some(df))?;
    let opts = trace_options(field, &Lipschitz::constant(1.0), &l.breaks);
    let e = integrate_region(&|p| [field.eval(p).dot((l.grad)(p)).abs()], &l.region, &opts).map_err(quad_err)?;
    Ok(e.value[0] / delta)
}

/// Classifies whether the normal trace of `field` on `omega` is carried by a Radon measure,
/// from the limit of the boundary-layer criterion.
pub fn pure_part_detector(field: &DMField, omega: &Region, schedule: &ScaleSchedule) -> Detection {
    let inconclusive = |note: String, trace: Vec<(f64, f64)>| Detection {
        class: PurePart::Inconclusive,
        criterion: LimitResult { value: f64::NAN, error_bound: f64::INFINITY, status: LimitStatus::BudgetExhausted, trace },
        note: Some(note),
    };
    let df = match DistanceField::new(omega) {
        Ok(d) => Arc::new(d),
        Err(e) => return inconclusive(e.to_string(), vec![]),
    };
    let mut tr = LimitTracker::new(*schedule);
    let mut verdict = None;
    for i in 0..schedule.steps {
        let d = schedule.scale(i);
        let v = match criterion_term(field, omega, d, &df) {
            Ok(v) => v,
            Err(TraceError::Diverging(_)) => f64::INFINITY,
            Err(e) => return inconclusive(e.to_string(), vec![]),
        };
        if let Some(r) = tr.push(d, v) {
            verdict = Some(r);
            break;
        }
    }
    let criterion = verdict.unwrap_or_else(|| tr.finish());
    let class = match criterion.status {
        LimitStatus::Converged => PurePart::RadonRepresentable,
        LimitStatus::Diverging => PurePart::PureGradientPartRequired,
        _ => PurePart::Inconclusive,
    };
    Detection { class, criterion, note: None }
}

/// Closed form of the vortex strip sum `S_k = (1/2) ln(1 + k^2) + k arctan(1/k)`.
pub fn vortex_strip_sum(k: f64) -> f64 {
    0.5 * (1.0 + k * k).ln() + k * (1.0 / k).atan()
}

/// Closed form of the point-source strip sum
/// `S_k = 1/2 - (arctan(1/k) - (k/2) ln(1 + 1/k^2)) / pi`.
pub fn point_source_strip_sum(k: f64) -> f64 {
    0.5 - ((1.0 / k).atan() - 0.5 * k * (1.0 + 1.0 / (k * k)).ln()) / PI
}
