//! Finitely additive measures represented by limit recipes.
//!
//! A [`LimitMeasure`] stores a pre-limit functional `(g, A, delta) -> integral of g over A
//! at scale delta`; evaluating a set or integrating a function extrapolates delta -> 0
//! along the measure's schedule.

use std::cell::RefCell;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::{BBox, BoundaryCurve, GeomError, Piece};
use crate::quad::{
    integrate_piece, integrate_region, region_area, try_limit_extrapolate_vec, LimitStatus, LimitTracker,
    QuadError, RegionOptions, Tol,
};
use crate::{LimitResult, Point, Region, ScaleSchedule};

/// Tolerance for certificates built on top of measure evaluations.
pub const CERT_TOL: f64 = 1e-3;
/// Area below which a set difference counts as empty.
pub const AREA_TOL: f64 = 1e-9;
/// Quadrature tolerance for the discontinuous integrands of Daniell levels.
pub const DANIELL_REL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error("support point ({x}, {y}) has no positive-area neighbourhood in the ambient set")]
    Support { x: f64, y: f64 },
    #[error("regions {0} and {1} overlap")]
    NotDisjoint(usize, usize),
    #[error("set sequence is not decreasing at index {0}")]
    NotDecreasing(usize),
    #[error("algebra is not closed: {0}")]
    NotClosed(String),
    #[error("at least 3 quantisation levels are required")]
    TooFewLevels,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The measure itself, componentwise.
    Signed,
    /// A variation majorant (Euclidean for vector measures); always one component.
    Abs,
}

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Arguments of one pre-limit evaluation besides the integrand and the set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreCtx {
    pub scale: f64,
    pub mode: Mode,
    /// Relative tolerance for the inner quadratures.
    pub rel_tol: f64,
}

impl PreCtx {
    pub fn abs_tol(&self, magnitude: f64) -> f64 {
        self.rel_tol * 1e-2 * magnitude
    }
}

pub type PreFn = dyn Fn(&dyn Fn(Point) -> f64, Option<&Region>, &PreCtx) -> Result<Vec<f64>, FamError> + Send + Sync;

#[derive(Clone)]
pub struct LimitMeasure {
    pre: Arc<PreFn>,
    pub schedule: ScaleSchedule,
    pub ambient: Region,
    pub dim: usize,
    /// Construction kind recorded for reports.
    pub kind: String,
    /// Relative tolerance handed to the pre-limit quadratures.
    pub quad_rel: f64,
}

impl std::fmt::Debug for LimitMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LimitMeasure")
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .field("schedule", &self.schedule)
            .finish()
    }
}

fn one(_: Point) -> f64 {
    1.0
}

impl LimitMeasure {
    pub fn new(
        kind: impl Into<String>,
        ambient: Region,
        schedule: ScaleSchedule,
        dim: usize,
        pre: impl Fn(&dyn Fn(Point) -> f64, Option<&Region>, &PreCtx) -> Result<Vec<f64>, FamError> + Send + Sync + 'static,
    ) -> Self {
        LimitMeasure { pre: Arc::new(pre), schedule, ambient, dim, kind: kind.into(), quad_rel: 1e-10 }
    }

    pub fn with_quad_rel(mut self, rel: f64) -> Self {
        self.quad_rel = rel;
        self
    }

    pub fn with_schedule(mut self, s: ScaleSchedule) -> Self {
        self.schedule = s;
        self
    }

    /// Pre-limit value at one scale.
    pub fn pre_value(&self, g: &dyn Fn(Point) -> f64, set: Option<&Region>, scale: f64, mode: Mode) -> Result<Vec<f64>, FamError> {
        (self.pre)(g, set, &PreCtx { scale, mode, rel_tol: self.quad_rel })
    }

    fn is_null_set(&self, set: Option<&Region>) -> bool {
        match set {
            None => false,
            Some(s) => s.clone().intersect(self.ambient.clone()).bbox().is_none(),
        }
    }

    fn limits(&self, g: &dyn Fn(Point) -> f64, set: Option<&Region>, mode: Mode) -> Result<Vec<LimitResult>, FamError> {
        let dim = if mode == Mode::Abs { 1 } else { self.dim };
        if self.is_null_set(set) {
            return Ok(vec![LimitResult::exact(0.0); dim]);
        }
        try_limit_extrapolate_vec(|h| self.pre_value(g, set, h, mode), &self.schedule, dim)
    }

    /// Componentwise value on `a`.
    pub fn eval_vec(&self, a: &Region) -> Result<Vec<LimitResult>, FamError> {
        self.limits(&one, Some(a), Mode::Signed)
    }

    /// First component on `a`; `eval(empty) = 0` exactly.
    pub fn eval(&self, a: &Region) -> Result<LimitResult, FamError> {
        Ok(self.eval_vec(a)?.swap_remove(0))
    }

    /// Variation majorant `|m|(a)`.
    pub fn variation(&self, a: &Region) -> Result<LimitResult, FamError> {
        Ok(self.limits(&one, Some(a), Mode::Abs)?.swap_remove(0))
    }

    /// `integral of g dm` over the ambient set, componentwise.
    pub fn integrate(&self, g: &dyn Fn(Point) -> f64) -> Result<Vec<LimitResult>, FamError> {
        self.limits(g, None, Mode::Signed)
    }

    /// `integral of |g| d|m|`.
    pub fn integrate_abs(&self, g: &dyn Fn(Point) -> f64) -> Result<LimitResult, FamError> {
        Ok(self.limits(g, None, Mode::Abs)?.swap_remove(0))
    }

    /// The variation majorant as a nonnegative scalar measure of its own.
    pub fn total_variation(&self) -> LimitMeasure {
        let inner = self.clone();
        LimitMeasure::new(format!("|{}|", self.kind), self.ambient.clone(), self.schedule, 1, move |g, set, c| {
            (inner.pre)(g, set, &PreCtx { mode: Mode::Abs, ..*c })
        })
    }
}

fn restrict(ambient: &Region, set: Option<&Region>) -> Region {
    match set {
        Some(s) => s.clone().intersect(ambient.clone()),
        None => ambient.clone(),
    }
}

fn apply_mode(g: &dyn Fn(Point) -> f64, mode: Mode) -> impl Fn(Point) -> f64 + '_ {
    move |p| match mode {
        Mode::Signed => g(p),
        Mode::Abs => g(p).abs(),
    }
}

fn ball_ratio(
    g: &dyn Fn(Point) -> f64,
    target: &Region,
    ambient: &Region,
    x: Point,
    delta: f64,
    rel: f64,
) -> Result<f64, FamError> {
    let ball = Region::disk(x, delta);
    let den = region_area(&ball.clone().intersect(ambient.clone()))?;
    if den <= 0.0 {
        return Err(FamError::Support { x: x.x, y: x.y });
    }
    let piece = target.clone().intersect(ball);
    if piece.bbox().is_none() {
        return Ok(0.0);
    }
    let opts = RegionOptions::default().with_tol(rel * 1e-2 * delta * delta, rel);
    let num = integrate_region(&|p| [g(p)], &piece, &opts)?.value[0];
    Ok(num / den)
}

/// Density measure at `p`: `m(A) = lim lambda(A cap B(p,d) cap ambient) / lambda(B(p,d) cap ambient)`.
pub fn density_measure(p: Point, ambient: Region, schedule: ScaleSchedule) -> Result<LimitMeasure, FamError> {
    let d = crate::geometry::density_at(&ambient, p, schedule.scale(schedule.steps - 1))?;
    if d <= 0.0 {
        return Err(FamError::Support { x: p.x, y: p.y });
    }
    let amb = ambient.clone();
    Ok(LimitMeasure::new("density", ambient, schedule, 1, move |g, set, c| {
        let target = restrict(&amb, set);
        let gm = apply_mode(g, c.mode);
        Ok(vec![ball_ratio(&gm, &target, &amb, p, c.scale, c.rel_tol)?])
    }))
}

/// Lebesgue measure restricted to the ambient set (scale independent).
pub fn area_measure(ambient: Region) -> LimitMeasure {
    let amb = ambient.clone();
    LimitMeasure::new("area", ambient, ScaleSchedule::default().with_steps(3), 1, move |g, set, c| {
        let target = restrict(&amb, set);
        let gm = apply_mode(g, c.mode);
        let opts = RegionOptions::default().with_tol(c.rel_tol * 1e-2, c.rel_tol);
        Ok(vec![integrate_region(&|p| [gm(p)], &target, &opts)?.value[0]])
    })
}

/// Support of a smeared Radon measure.
#[derive(Clone, Debug)]
pub enum SmearSupport {
    /// Arc-length measure on a curve, weighted by the density function.
    Curve(BoundaryCurve<f64>),
    /// Weighted atoms; the density function multiplies the weights.
    Points(Vec<(Point, f64)>),
}

fn support_samples(s: &SmearSupport) -> Vec<Point> {
    match s {
        SmearSupport::Curve(c) => c
            .pieces
            .iter()
            .flat_map(|p: &Piece<f64>| [p.start_point(), p.midpoint(), p.end_point()])
            .collect(),
        SmearSupport::Points(v) => v.iter().map(|(p, _)| *p).collect(),
    }
}

/// Constructive smearing: every support point spreads its mass over the ambient part of a
/// shrinking ball, normalised so the ball carries exactly that mass.
pub fn smear_radon(
    support: SmearSupport,
    density: ScalarFn,
    ambient: Region,
    schedule: ScaleSchedule,
) -> Result<LimitMeasure, FamError> {
    let probe = schedule.scale(schedule.steps - 1);
    for x in support_samples(&support) {
        if crate::geometry::density_at(&ambient, x, probe)? <= 0.0 {
            return Err(FamError::Support { x: x.x, y: x.y });
        }
    }
    let amb = ambient.clone();
    let kind = match support {
        SmearSupport::Curve(_) => "smear-curve",
        SmearSupport::Points(_) => "smear-points",
    };
    Ok(LimitMeasure::new(kind, ambient, schedule, 1, move |g, set, c| {
        let (h, mode, rel) = (c.scale, c.mode, c.rel_tol);
        let target = restrict(&amb, set);
        let gm = apply_mode(g, mode);
        let w = |x: Point| match mode {
            Mode::Signed => density(x),
            Mode::Abs => density(x).abs(),
        };
        match &support {
            SmearSupport::Points(pts) => {
                let mut s = 0.0;
                for (x, wt) in pts {
                    let wt = if mode == Mode::Abs { wt.abs() } else { *wt };
                    s += wt * w(*x) * ball_ratio(&gm, &target, &amb, *x, h, rel)?;
                }
                Ok(vec![s])
            }
            SmearSupport::Curve(c) => {
                let err: RefCell<Option<FamError>> = RefCell::new(None);
                let mut s = 0.0;
                for piece in &c.pieces {
                    let f = |x: Point, _n: Point| -> [f64; 1] {
                        match ball_ratio(&gm, &target, &amb, x, h, rel) {
                            Ok(v) => [w(x) * v],
                            Err(e) => {
                                err.borrow_mut().get_or_insert(e);
                                [0.0]
                            }
                        }
                    };
                    let (v, _) = integrate_piece(&f, piece, 0.0, piece.length(), Tol::new(rel, rel));
                    s += v[0];
                }
                match err.into_inner() {
                    Some(e) => Err(e),
                    None => Ok(vec![s]),
                }
            }
        }
    }))
}

/// Combined status of several limit results: the first non-converged status wins.
pub fn combined_status<'a>(rs: impl IntoIterator<Item = &'a LimitResult>) -> LimitStatus {
    rs.into_iter().map(|r| r.status).find(|s| *s != LimitStatus::Converged).unwrap_or(LimitStatus::Converged)
}

/// Finite sum of coefficients times indicators of pairwise disjoint regions.
#[derive(Clone, Debug)]
pub struct SimpleFunction {
    pub parts: Vec<(Region, f64)>,
}

impl SimpleFunction {
    pub fn new(parts: Vec<(Region, f64)>) -> Result<Self, FamError> {
        for i in 0..parts.len() {
            for j in (i + 1)..parts.len() {
                let overlap = region_area(&parts[i].0.clone().intersect(parts[j].0.clone()))?;
                if overlap > AREA_TOL {
                    return Err(FamError::NotDisjoint(i, j));
                }
            }
        }
        Ok(SimpleFunction { parts })
    }

    pub fn value(&self, p: Point) -> f64 {
        self.parts.iter().filter(|(r, _)| r.contains(p)).map(|(_, c)| *c).sum()
    }

    /// `sum c_i m(R_i)`, with summed error bounds.
    pub fn integrate(&self, m: &LimitMeasure) -> Result<LimitResult, FamError> {
        let mut value = 0.0;
        let mut err = 0.0;
        let mut status = LimitStatus::Converged;
        for (r, c) in &self.parts {
            let e = m.eval(r)?;
            value += c * e.value;
            err += c.abs() * e.error_bound;
            if e.status != LimitStatus::Converged {
                status = e.status;
            }
        }
        Ok(LimitResult { value, error_bound: err, status, trace: vec![] })
    }
}

/// Finite list of sets used for outer measures.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub sets: Vec<Region>,
    /// Whether closure under union, intersection and difference was verified.
    pub closed: bool,
}

fn same_set(a: &Region, b: &Region) -> Result<bool, FamError> {
    let d1 = region_area(&a.clone().minus(b.clone()))?;
    let d2 = region_area(&b.clone().minus(a.clone()))?;
    Ok(d1 + d2 <= AREA_TOL)
}

impl Algebra {
    /// Validated algebra: every union, intersection and difference of two members must be a
    /// member up to a null set.
    pub fn new(sets: Vec<Region>) -> Result<Self, FamError> {
        for a in &sets {
            for b in &sets {
                for (name, c) in [
                    ("union", a.clone().union(b.clone())),
                    ("intersection", a.clone().intersect(b.clone())),
                    ("difference", a.clone().minus(b.clone())),
                ] {
                    let empty = region_area(&c)? <= AREA_TOL;
                    let mut found = empty;
                    for s in &sets {
                        if found {
                            break;
                        }
                        found = same_set(&c, s)?;
                    }
                    if !found {
                        return Err(FamError::NotClosed(format!("{name} of two members is missing")));
                    }
                }
            }
        }
        Ok(Algebra { sets, closed: true })
    }

    /// Unvalidated family; the infimum is then taken over the listed sets only.
    pub fn generating(sets: Vec<Region>) -> Self {
        Algebra { sets, closed: false }
    }

    /// Dyadic boxes of `bb` at levels `0..=level`.
    pub fn dyadic(bb: BBox<f64>, level: u32) -> Self {
        let mut sets = Vec::new();
        for l in 0..=level {
            let n = 1usize << l;
            let wx = (bb.hi.x - bb.lo.x) / n as f64;
            let wy = (bb.hi.y - bb.lo.y) / n as f64;
            for i in 0..n {
                for j in 0..n {
                    let lo = Point::new(bb.lo.x + wx * i as f64, bb.lo.y + wy * j as f64);
                    sets.push(Region::rect(lo, Point::new(lo.x + wx, lo.y + wy)));
                }
            }
        }
        Algebra::generating(sets)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterValue {
    /// Infimum over converged supersets, `+inf` when the algebra has none.
    pub value: f64,
    /// Index of the minimising set.
    pub witness: Option<usize>,
}

impl OuterValue {
    pub fn has_superset(&self) -> bool {
        self.witness.is_some()
    }
}

/// Outer measure of `a`: infimum of `m(S)` over algebra members containing `a`.
pub fn outer_measure(m: &LimitMeasure, a: &Region, algebra: &Algebra) -> Result<OuterValue, FamError> {
    let mut best = OuterValue { value: f64::INFINITY, witness: None };
    for (i, s) in algebra.sets.iter().enumerate() {
        if region_area(&a.clone().minus(s.clone()))? > AREA_TOL {
            continue;
        }
        let e = m.eval(s)?;
        if e.converged() && e.value < best.value {
            best = OuterValue { value: e.value, witness: Some(i) };
        }
    }
    Ok(best)
}

/// Grid of `2^depth x 2^depth` cells over a bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub i: usize,
    pub j: usize,
    pub depth: u32,
    pub lo: Point,
    pub hi: Point,
}

impl GridCell {
    pub fn region(&self) -> Region {
        Region::rect(self.lo, self.hi)
    }

    /// The cell grown by half its size on every side.
    pub fn neighbourhood(&self) -> Region {
        let h = Point::new((self.hi.x - self.lo.x) * 0.5, (self.hi.y - self.lo.y) * 0.5);
        Region::rect(self.lo - h, self.hi + h)
    }

    fn children(&self) -> [GridCell; 4] {
        let m = Point::new((self.lo.x + self.hi.x) * 0.5, (self.lo.y + self.hi.y) * 0.5);
        let d = self.depth + 1;
        [
            GridCell { i: 2 * self.i, j: 2 * self.j, depth: d, lo: self.lo, hi: m },
            GridCell { i: 2 * self.i + 1, j: 2 * self.j, depth: d, lo: Point::new(m.x, self.lo.y), hi: Point::new(self.hi.x, m.y) },
            GridCell { i: 2 * self.i, j: 2 * self.j + 1, depth: d, lo: Point::new(self.lo.x, m.y), hi: Point::new(m.x, self.hi.y) },
            GridCell { i: 2 * self.i + 1, j: 2 * self.j + 1, depth: d, lo: m, hi: self.hi },
        ]
    }
}

fn grid_cells(bb: BBox<f64>, depth: u32) -> Vec<GridCell> {
    let n = 1usize << depth;
    let wx = (bb.hi.x - bb.lo.x) / n as f64;
    let wy = (bb.hi.y - bb.lo.y) / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let lo = Point::new(bb.lo.x + wx * i as f64, bb.lo.y + wy * j as f64);
            out.push(GridCell { i, j, depth, lo, hi: Point::new(lo.x + wx, lo.y + wy) });
        }
    }
    out
}

/// Union of grid cells with horizontally adjacent cells merged into single rectangles.
pub fn cells_union(cells: &[GridCell]) -> Region {
    let mut sorted: Vec<GridCell> = cells.to_vec();
    sorted.sort_by(|a, b| (a.j, a.i).cmp(&(b.j, b.i)));
    let mut out = Region::Empty;
    let mut k = 0;
    while k < sorted.len() {
        let start = sorted[k];
        let mut end = start;
        while k + 1 < sorted.len() && sorted[k + 1].j == end.j && sorted[k + 1].i == end.i + 1 {
            k += 1;
            end = sorted[k];
        }
        out = out.union(Region::rect(start.lo, Point::new(end.hi.x, start.hi.y)));
        k += 1;
    }
    out
}

/// Over-approximation of the core: cells whose half-cell neighbourhood carries variation
/// above the certificate tolerance, found by quadtree descent.
pub fn core_estimate(m: &LimitMeasure, depth: u32) -> Result<Vec<GridCell>, FamError> {
    let bb = match m.ambient.bounded_bbox()? {
        Some(b) => b,
        None => return Ok(vec![]),
    };
    let mut frontier = vec![GridCell { i: 0, j: 0, depth: 0, lo: bb.lo, hi: bb.hi }];
    for _ in 0..depth {
        let mut next = Vec::new();
        for c in &frontier {
            for ch in c.children() {
                let v = m.variation(&ch.neighbourhood())?;
                if v.value > CERT_TOL || !v.converged() {
                    next.push(ch);
                }
            }
        }
        frontier = next;
    }
    frontier.sort_by(|a, b| (a.j, a.i).cmp(&(b.j, b.i)));
    Ok(frontier)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvBound {
    pub value: f64,
    /// Partition cells whose evaluation did not converge.
    pub skipped: Vec<usize>,
}

/// `sum |m(P_i)|` over converged cells (Euclidean norm for vector measures).
pub fn tv_lower_bound(m: &LimitMeasure, partition: &[Region]) -> Result<TvBound, FamError> {
    let mut value = 0.0;
    let mut skipped = Vec::new();
    for (i, p) in partition.iter().enumerate() {
        let v = m.eval_vec(p)?;
        if v.iter().all(|r| r.converged()) {
            value += v.iter().map(|r| r.value * r.value).sum::<f64>().sqrt();
        } else {
            skipped.push(i);
        }
    }
    Ok(TvBound { value, skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuraVerdict {
    PureSupported,
    NotCertified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuraCertificate {
    /// Reference measure of each `A_k`.
    pub lambda: Vec<f64>,
    /// Variation of `m` on the ambient complement of each `A_k`.
    pub complement_mass: Vec<f64>,
    /// `m(A_k)`.
    pub mass: Vec<f64>,
    pub verdict: AuraVerdict,
}

/// Checks that a decreasing sequence of sets carries all of `m` while its reference measure
/// tends to zero.
pub fn aura_check(m: &LimitMeasure, seq: &[Region], lambda_ref: &LimitMeasure) -> Result<AuraCertificate, FamError> {
    for k in 1..seq.len() {
        if region_area(&seq[k].clone().minus(seq[k - 1].clone()))? > AREA_TOL {
            return Err(FamError::NotDecreasing(k));
        }
    }
    let mut cert = AuraCertificate { lambda: vec![], complement_mass: vec![], mass: vec![], verdict: AuraVerdict::NotCertified };
    let mut ok = !seq.is_empty();
    for a in seq {
        let l = lambda_ref.eval(a)?;
        let c = m.variation(&m.ambient.clone().minus(a.clone()))?;
        let v = m.eval(a)?;
        ok &= l.converged() && c.converged() && c.value.abs() <= CERT_TOL;
        cert.lambda.push(l.value);
        cert.complement_mass.push(c.value);
        cert.mass.push(v.value);
    }
    let decreasing = cert.lambda.windows(2).all(|w| w[1] <= w[0] + AREA_TOL);
    let vanishing = cert.lambda.last().map_or(false, |l| *l <= CERT_TOL);
    if ok && decreasing && vanishing {
        cert.verdict = AuraVerdict::PureSupported;
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `(index, outer measure of the deviation set)`.
    pub masses: Vec<(usize, f64)>,
    pub converges: bool,
}

/// Grid approximation of `{p : |f_k(p) - f(p)| > eps}`: a cell is flagged when any point of a
/// nine-point stencil deviates (non-finite values count as deviating).
pub fn deviation_cells(
    fk: &dyn Fn(Point) -> f64,
    f: &dyn Fn(Point) -> f64,
    eps: f64,
    bb: BBox<f64>,
    depth: u32,
) -> Vec<GridCell> {
    grid_cells(bb, depth)
        .into_iter()
        .filter(|c| {
            (0..3).any(|a| {
                (0..3).any(|b| {
                    let p = Point::new(
                        c.lo.x + (c.hi.x - c.lo.x) * a as f64 * 0.5,
                        c.lo.y + (c.hi.y - c.lo.y) * b as f64 * 0.5,
                    );
                    let d = (fk(p) - f(p)).abs();
                    !(d <= eps)
                })
            })
        })
        .collect()
}

/// Convergence in measure of `f_k -> f` for the listed indices. Without an algebra the
/// deviation sets (unions of grid cells) are evaluated directly, i.e. the algebra generated
/// by the grid is used.
pub fn converges_in_measure(
    fk: &dyn Fn(usize, Point) -> f64,
    f: &dyn Fn(Point) -> f64,
    m: &LimitMeasure,
    eps: f64,
    algebra: Option<&Algebra>,
    grid_depth: u32,
    indices: &[usize],
) -> Result<ConvergenceReport, FamError> {
    let bb = m.ambient.bounded_bbox()?.ok_or(GeomError::Degenerate("empty ambient set".into()))?;
    let mut masses = Vec::new();
    for &k in indices {
        let cells = deviation_cells(&|p| fk(k, p), f, eps, bb, grid_depth);
        let set = cells_union(&cells);
        let mass = match algebra {
            Some(alg) => outer_measure(m, &set, alg)?.value,
            None => m.eval(&set)?.value,
        };
        masses.push((k, mass));
    }
    let n = masses.len();
    let converges = n >= 2 && masses[n - 2..].iter().all(|(_, v)| v.abs() <= CERT_TOL);
    Ok(ConvergenceReport { masses, converges })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaniellLevel {
    pub level: u32,
    pub integral: f64,
    /// `integral of |f_L - f_{L-1}| d|m|`, the Cauchy check between consecutive levels.
    pub cauchy: f64,
    pub status: LimitStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaniellResult {
    pub result: LimitResult,
    pub levels: Vec<DaniellLevel>,
    pub integrable: bool,
}

fn value_range(f: &dyn Fn(Point) -> f64, ambient: &Region, bb: BBox<f64>) -> (f64, f64) {
    let n = 64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=n {
        for j in 0..=n {
            let p = Point::new(
                bb.lo.x + (bb.hi.x - bb.lo.x) * i as f64 / n as f64,
                bb.lo.y + (bb.hi.y - bb.lo.y) * j as f64 / n as f64,
            );
            if ambient.contains(p) {
                let v = f(p);
                if v.is_finite() {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
    }
    if lo > hi {
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}

fn quantise(v: f64, lo: f64, h: f64) -> f64 {
    if h <= 0.0 {
        lo
    } else {
        lo + ((v - lo) / h).floor() * h
    }
}

/// Daniell integral by range quantisation: level `L` rounds `f` down to a multiple of
/// `range / 2^L` above its sampled minimum, giving a simple function whose level sets are
/// integrated against `m`; levels are checked for the Cauchy condition and extrapolated.
pub fn daniell_integrate(f: &dyn Fn(Point) -> f64, m: &LimitMeasure, levels: u32) -> Result<DaniellResult, FamError> {
    if levels < 3 {
        return Err(FamError::TooFewLevels);
    }
    let bb = m.ambient.bounded_bbox()?.ok_or(GeomError::Degenerate("empty ambient set".into()))?;
    // Quantised integrands jump across level sets; tight tolerances only buy refinement at
    // the jumps.
    let m = &m.clone().with_quad_rel(m.quad_rel.max(DANIELL_REL));
    let (lo, hi) = value_range(f, &m.ambient, bb);
    let range = hi - lo;
    let clamp = |v: f64| v.max(lo).min(hi);
    let sched = ScaleSchedule { initial: range.max(1.0), ratio: 0.5, steps: levels as usize, tol: CERT_TOL, cap: 1e12 };
    let mut tracker = LimitTracker::new(sched);
    let mut out = Vec::new();
    let mut verdict = None;
    for l in 1..=levels {
        let h = range / (1u64 << l) as f64;
        let hp = range / (1u64 << (l - 1)) as f64;
        let fl = |p: Point| quantise(clamp(f(p)), lo, h);
        let r = m.integrate(&fl)?.swap_remove(0);
        let cauchy = m.integrate_abs(&|p: Point| fl(p) - quantise(clamp(f(p)), lo, hp))?.value;
        out.push(DaniellLevel { level: l, integral: r.value, cauchy, status: r.status });
        if verdict.is_none() {
            verdict = tracker.push(h, r.value);
        }
        if verdict.is_some() && out.len() >= 3 {
            break;
        }
    }
    let result = match verdict {
        Some(v) => v,
        None => tracker.finish(),
    };
    let cs: Vec<f64> = out.iter().map(|d| d.cauchy).collect();
    let decreasing = cs.windows(2).all(|w| w[1] <= w[0] + CERT_TOL * 1e-3);
    let small = cs.last().map_or(true, |c| *c <= CERT_TOL);
    Ok(DaniellResult { integrable: decreasing || small, result, levels: out })
}

/// The strip family `A_j = [1/(j+2), 1/(j+1)) x [-1, 1]`, `j = 1..=n`, whose union is
/// `(0, 1/2) x [-1, 1]`; the half-open strips are realised as open rectangles, which differ by
/// null sets.
pub fn strip_family(n: usize) -> Vec<Region> {
    (1..=n)
        .map(|j| Region::rect(Point::new(1.0 / (j as f64 + 2.0), -1.0), Point::new(1.0 / (j as f64 + 1.0), 1.0)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaReport {
    pub parts: Vec<f64>,
    pub sum_of_parts: f64,
    pub union_value: f64,
    /// Set when the union carries mass the parts do not add up to.
    pub violated: bool,
}

/// Compares `sum m(A_j)` with `m(union)` for a disjoint family.
pub fn sigma_additivity_check(m: &LimitMeasure, family: &[Region], union: &Region) -> Result<SigmaReport, FamError> {
    let mut parts = Vec::new();
    for a in family {
        parts.push(m.eval(a)?.value);
    }
    let sum: f64 = parts.iter().sum();
    let u = m.eval(union)?;
    Ok(SigmaReport { parts, sum_of_parts: sum, union_value: u.value, violated: u.converged() && (u.value - sum).abs() > CERT_TOL })
}
