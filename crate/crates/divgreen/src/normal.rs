//! Normal approximations of indicators, normal measures and Gauss formulas.
//!
//! Every right-hand side is computed from the identity
//! `integral eta_k d(div F) = -integral D eta_k . F` and a limit in the scale `delta = 1/k`.

use std::f64::consts::{LN_10, PI};
use std::cell::RefCell;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::fam::{tv_lower_bound, FamError, LimitMeasure, Mode, SimpleFunction, TvBound};
use crate::fields::{divergence_of, DMField, FieldError, Integrability};
use crate::geometry::{
    density_at, neighborhood, perimeter, reduced_boundary_cut, BoundaryCurve, ClassKind, DistanceField,
    GeomError, PointClass, Side,
};
use crate::quad::{
    adaptive, integrate_curve, integrate_region, LimitStatus, LimitTracker, QuadError, RegionOptions, SingularLine, Tol,
};
use crate::{LimitResult, Point, Region, ScaleSchedule};

/// Default tolerance on Gauss residuals.
pub const GAUSS_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NormalError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Fam(#[from] FamError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("the {kind} approximation needs a nonempty inner neighbourhood")]
    EmptyInner { kind: &'static str },
    #[error("field is singular on an interface near ({x}, {y})")]
    SingularInterface { x: f64, y: f64 },
    #[error("unknown approximation kind `{0}`")]
    UnknownKind(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxKind {
    CanonicalMollified,
    OuterPortmanteau,
    InnerPortmanteau,
    DistanceRamp,
}

impl ApproxKind {
    pub const ALL: [ApproxKind; 4] =
        [ApproxKind::CanonicalMollified, ApproxKind::OuterPortmanteau, ApproxKind::InnerPortmanteau, ApproxKind::DistanceRamp];

    pub fn name(&self) -> &'static str {
        match self {
            ApproxKind::CanonicalMollified => "canonical",
            ApproxKind::OuterPortmanteau => "outer",
            ApproxKind::InnerPortmanteau => "inner",
            ApproxKind::DistanceRamp => "ramp",
        }
    }

    pub fn long_name(&self) -> &'static str {
        match self {
            ApproxKind::CanonicalMollified => "canonical-mollified",
            ApproxKind::OuterPortmanteau => "outer-portmanteau",
            ApproxKind::InnerPortmanteau => "inner-portmanteau",
            ApproxKind::DistanceRamp => "distance-ramp",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            ApproxKind::CanonicalMollified => "indicator mollified at radius 1/k; chi = density",
            ApproxKind::OuterPortmanteau => "max(0, 1 - k dist(x, omega)); chi = 1 on the closure",
            ApproxKind::InnerPortmanteau => "min(1, k dist(x, complement)) inside; chi = 1 on the open set",
            ApproxKind::DistanceRamp => "min(1, max(0, k dist(x, complement) - 1)); chi = 1 on the open set",
        }
    }

    /// Accepts the short names and the kebab-case names.
    pub fn parse(s: &str) -> Result<Self, NormalError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s || k.long_name() == s)
            .ok_or_else(|| NormalError::UnknownKind(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    /// Scales `delta = 1/k`; the initial scale is halved until the construction is defined.
    pub schedule: ScaleSchedule,
    /// Number of scales used for the validity report.
    pub validity_steps: usize,
}

impl Default for ApproxParams {
    fn default() -> Self {
        ApproxParams {
            schedule: ScaleSchedule { initial: 0.125, ratio: 0.5, steps: 16, tol: 1e-6, cap: 1e9 },
            validity_steps: 6,
        }
    }
}

/// `||D eta_k||_1` at the first few scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub scales: Vec<f64>,
    pub norms: Vec<f64>,
    pub sup: f64,
    pub limit: LimitResult,
    /// False when the norms trend to infinity (the bounded-variation condition fails).
    pub bounded: bool,
}

#[derive(Clone, Debug)]
pub struct NormalApproximation {
    pub kind: ApproxKind,
    pub omega: Region,
    pub schedule: ScaleSchedule,
    pub label: String,
    pub validity: Validity,
    dist: DistanceField<f64>,
    breaks: Vec<SingularLine<f64>>,
    scale_len: f64,
}

fn kernel_const() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let mut g = |r: f64| {
            let s = r * r;
            [if s < 1.0 { (-1.0 / (1.0 - s)).exp() * r } else { 0.0 }]
        };
        let e = adaptive(&mut g, 0.0, 1.0, Tol::new(1e-16, 1e-14), 200);
        1.0 / (2.0 * PI * e.value[0])
    })
}

/// Standard bump kernel scaled to radius `eps`, unit mass.
pub fn mollifier(z: Point, eps: f64) -> f64 {
    let s = z.norm2() / (eps * eps);
    if s >= 1.0 {
        0.0
    } else {
        kernel_const() * (-1.0 / (1.0 - s)).exp() / (eps * eps)
    }
}

/// Lines through corners along which distance gradients jump or kink; used as quadrature breaks.
pub(crate) fn corner_lines(c: &BoundaryCurve<f64>) -> Vec<SingularLine<f64>> {
    let mut out = Vec::new();
    for &k in &c.corners {
        let mut normals = Vec::new();
        for p in &c.pieces {
            let l = p.length();
            if p.start_point().dist(k) < 1e-9 {
                normals.push(p.normal_at(0.0));
            }
            if p.end_point().dist(k) < 1e-9 {
                normals.push(p.normal_at(l));
            }
        }
        for n in &normals {
            out.push(SingularLine { point: k, dir: *n });
        }
        if normals.len() == 2 {
            let s = normals[0] + normals[1];
            if s.norm() > 1e-9 {
                out.push(SingularLine { point: k, dir: s.normalized() });
            }
        }
    }
    out
}

impl NormalApproximation {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn boundary(&self) -> &BoundaryCurve<f64> {
        &self.dist.boundary
    }

    /// Distance to the complement (zero outside).
    fn d_in(&self, p: Point) -> f64 {
        self.dist.inside(p)
    }

    fn d_out(&self, p: Point) -> f64 {
        self.dist.outside(p)
    }

    /// `eta` at scale `delta`.
    pub fn eta(&self, delta: f64, p: Point) -> f64 {
        match self.kind {
            ApproxKind::OuterPortmanteau => (1.0 - self.d_out(p) / delta).max(0.0),
            ApproxKind::InnerPortmanteau => (self.d_in(p) / delta).min(1.0),
            ApproxKind::DistanceRamp => (self.d_in(p) / delta - 1.0).clamp(0.0, 1.0),
            ApproxKind::CanonicalMollified => {
                let piece = self.omega.clone().intersect(Region::disk(p, delta));
                let opts = RegionOptions::default().with_tol(1e-12, 1e-10);
                integrate_region(&|y| [mollifier(p - y, delta)], &piece, &opts).map_or(f64::NAN, |e| e.value[0])
            }
        }
    }

    /// `D eta` at scale `delta`.
    pub fn grad(&self, delta: f64, p: Point) -> Point {
        match self.kind {
            ApproxKind::OuterPortmanteau => {
                let d = self.d_out(p);
                if d > 0.0 && d < delta {
                    self.dist.boundary_distance_gradient(p) * (-1.0 / delta)
                } else {
                    Point::origin()
                }
            }
            ApproxKind::InnerPortmanteau | ApproxKind::DistanceRamp => {
                let lo = if self.kind == ApproxKind::DistanceRamp { delta } else { 0.0 };
                let d = self.d_in(p);
                if d > lo && d < lo + delta {
                    self.dist.boundary_distance_gradient(p) * (1.0 / delta)
                } else {
                    Point::origin()
                }
            }
            ApproxKind::CanonicalMollified => {
                // D(1_omega * rho) = -(n H^1 on the boundary) * rho.
                let mut acc = Point::origin();
                for piece in &self.dist.boundary.pieces {
                    for (s0, s1) in piece.clip_to_disk(p, delta) {
                        let mut g = |s: f64| {
                            let w = mollifier(p - piece.point_at(s), delta);
                            let n = piece.normal_at(s);
                            [w * n.x, w * n.y]
                        };
                        let e = adaptive(&mut g, s0, s1, Tol::new(1e-9 / delta, 1e-8), 200);
                        acc = acc - Point::new(e.value[0], e.value[1]);
                    }
                }
                acc
            }
        }
    }

    /// Region containing the support of `D eta` at scale `delta`.
    pub fn support(&self, delta: f64) -> Result<Region, GeomError> {
        let inner = |w: f64| neighborhood(&self.omega, w, Side::Inner);
        Ok(match self.kind {
            ApproxKind::OuterPortmanteau => neighborhood(&self.omega, delta, Side::Outer)?.minus(self.omega.clone()),
            ApproxKind::InnerPortmanteau => match inner(delta) {
                Ok(i) => self.omega.clone().minus(i),
                Err(GeomError::EmptyInner { .. }) => self.omega.clone(),
                Err(e) => return Err(e),
            },
            ApproxKind::DistanceRamp => {
                let a = inner(delta)?;
                match inner(2.0 * delta) {
                    Ok(b) => a.minus(b),
                    Err(GeomError::EmptyInner { .. }) => a,
                    Err(e) => return Err(e),
                }
            }
            ApproxKind::CanonicalMollified => {
                let out = neighborhood(&self.omega, delta, Side::Outer)?;
                match inner(delta) {
                    Ok(i) => out.minus(i),
                    Err(GeomError::EmptyInner { .. }) => out,
                    Err(e) => return Err(e),
                }
            }
        })
    }

    /// The limit classifier `chi = lim eta_k`.
    pub fn chi(&self, p: Point) -> f64 {
        if self.omega.contains(p) {
            return 1.0;
        }
        let (d, _) = self.dist.boundary_distance(p);
        let on = d <= 1e-12 * self.scale_len;
        match self.kind {
            ApproxKind::OuterPortmanteau => {
                if on {
                    1.0
                } else {
                    0.0
                }
            }
            ApproxKind::InnerPortmanteau | ApproxKind::DistanceRamp => 0.0,
            ApproxKind::CanonicalMollified => {
                if on {
                    density_at(&self.omega, p, 1e-9 * self.scale_len).unwrap_or(0.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// `chi` as a function of a point classification.
    pub fn chi_of_class(&self, c: &PointClass<f64>) -> f64 {
        match (c.kind, self.kind) {
            (ClassKind::EssentialInterior, _) => 1.0,
            (ClassKind::EssentialExterior, _) => 0.0,
            (_, ApproxKind::CanonicalMollified) => c.density,
            (_, ApproxKind::OuterPortmanteau) => 1.0,
            _ => 0.0,
        }
    }

    /// Relative quadrature tolerance for shell integrals; the mollified kind nests a curve
    /// integral inside every evaluation and runs coarser.
    pub fn quad_rel(&self) -> f64 {
        if self.kind == ApproxKind::CanonicalMollified {
            1e-7
        } else {
            1e-9
        }
    }

    /// Quadrature options with breaks along corner lines.
    pub fn options(&self, rel: f64) -> RegionOptions<f64> {
        RegionOptions::default().with_tol(rel * 1e-2 * self.scale_len, rel).with_lines(&self.breaks)
    }

    /// `integral over set of h(x, -D eta(x)) dx` for `h` linear in its second argument; with
    /// `abs` the Euclidean norm of `h` is integrated instead (first component).
    ///
    /// The mollified kind is evaluated after Fubini,
    /// `integral over the boundary of integral rho(y - x) h(x, n(y)) dx dH^1(y)`, which for
    /// `abs` is a majorant of the variation.
    pub fn shell_pair(
        &self,
        delta: f64,
        set: Option<&Region>,
        opts: &RegionOptions<f64>,
        abs: bool,
        h: &dyn Fn(Point, Point) -> [f64; 2],
    ) -> Result<[f64; 2], QuadError> {
        let post = |v: [f64; 2]| if abs { [v[0].hypot(v[1]), 0.0] } else { v };
        if self.kind != ApproxKind::CanonicalMollified {
            let sup = self.support(delta)?;
            let r = match set {
                Some(s) => s.clone().intersect(sup),
                None => sup,
            };
            let e = integrate_region(&|x| post(h(x, -self.grad(delta, x))), &r, opts)?;
            return Ok(e.value);
        }
        let err: RefCell<Option<QuadError>> = RefCell::new(None);
        let inner_opts = RegionOptions { tol: Tol::new(opts.tol.abs, opts.tol.rel), ..opts.clone() };
        let e = integrate_curve(
            &|y, n| {
                let ball = Region::disk(y, delta);
                let r = match set {
                    Some(s) => s.clone().intersect(ball),
                    None => ball,
                };
                match integrate_region(&|x| post(h(x, n)).map(|c| c * mollifier(y - x, delta)), &r, &inner_opts) {
                    Ok(v) => v.value,
                    Err(e) => {
                        err.borrow_mut().get_or_insert(e);
                        [0.0, 0.0]
                    }
                }
            },
            &self.dist.boundary,
            Tol::new(opts.tol.abs, opts.tol.rel),
            &[],
        );
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(e.value),
        }
    }

    /// `||D eta||_1` at scale `delta`.
    pub fn grad_norm_l1(&self, delta: f64) -> Result<f64, NormalError> {
        let sup = self.support(delta)?;
        Ok(integrate_region(&|p| [self.grad(delta, p).norm()], &sup, &self.options(self.quad_rel() * 1e3))?.value[0])
    }
}

/// Builds the approximation; a failing bounded-variation condition is reported in
/// [`NormalApproximation::validity`], not as an error.
pub fn make_approximation(omega: &Region, kind: ApproxKind, params: ApproxParams) -> Result<NormalApproximation, NormalError> {
    let bb = omega.bounded_bbox()?.ok_or(GeomError::Degenerate("empty region".into()))?;
    let dist = DistanceField::new(omega)?;
    let mut schedule = params.schedule;
    let need = match kind {
        ApproxKind::DistanceRamp => 2.0,
        ApproxKind::InnerPortmanteau | ApproxKind::CanonicalMollified => 1.0,
        ApproxKind::OuterPortmanteau => 0.0,
    };
    if need > 0.0 {
        let mut tries = 0;
        while neighborhood(omega, need * schedule.initial, Side::Inner).is_err() {
            schedule.initial *= 0.5;
            tries += 1;
            if tries > 30 {
                return Err(NormalError::EmptyInner { kind: kind.name() });
            }
        }
    }
    let breaks = if kind == ApproxKind::CanonicalMollified { vec![] } else { corner_lines(&dist.boundary) };
    let mut na = NormalApproximation {
        kind,
        omega: omega.clone(),
        schedule,
        label: format!("{omega:?}"),
        validity: Validity { scales: vec![], norms: vec![], sup: 0.0, limit: LimitResult::exact(0.0), bounded: true },
        dist,
        breaks,
        scale_len: bb.diameter(),
    };
    // Mollified gradients nest a curve integral in every evaluation; keep their sweep short.
    let steps = match kind {
        ApproxKind::CanonicalMollified => params.validity_steps.clamp(3, 4),
        _ => params.validity_steps.max(3),
    };
    let vs = ScaleSchedule { steps, tol: 1e-3, ..schedule };
    let mut tr = LimitTracker::new(vs);
    let mut scales = Vec::new();
    let mut norms = Vec::new();
    for i in 0..steps {
        let d = vs.scale(i);
        let n = na.grad_norm_l1(d)?;
        scales.push(d);
        norms.push(n);
        tr.push(d, n);
    }
    let limit = tr.finish();
    let sup = norms.iter().fold(0.0f64, |m, v| m.max(*v));
    let bounded = limit.status != LimitStatus::Diverging && sup.is_finite();
    na.validity = Validity { scales, norms, sup, limit, bounded };
    Ok(na)
}

/// The normal measure `nu(B) = -lim integral over B of D eta_k`, two components.
pub fn normal_measure_shell(na: &NormalApproximation) -> Result<LimitMeasure, NormalError> {
    let ambient = neighborhood(&na.omega, na.schedule.initial * 2.0, Side::Outer)?;
    let n = na.clone();
    let m = LimitMeasure::new(format!("normal-shell/{}", na.kind.name()), ambient, na.schedule, 2, move |g, set, c| {
        let opts = n.options(c.rel_tol);
        let abs = c.mode == Mode::Abs;
        let v = n.shell_pair(c.scale, set, &opts, abs, &|x, v| {
            let w = g(x);
            [w * v.x, w * v.y]
        })?;
        Ok(if abs { vec![v[0]] } else { v.to_vec() })
    });
    Ok(m.with_quad_rel(na.quad_rel()))
}

/// Boundary route `nu(B) = -integral over the reduced boundary of B of chi n_B`.
///
/// Pieces of the boundary of `b` are cut where they cross the boundary of `omega`; `chi`
/// is evaluated pointwise, so pieces running along the boundary of `omega` carry its
/// boundary value.
pub fn normal_measure_boundary(omega: &Region, chi: &dyn Fn(Point) -> f64, b: &Region) -> Result<[f64; 2], NormalError> {
    if b.bounded_bbox().is_err() {
        // Unbounded test sets are clipped to a box containing the closure of omega.
        let bb = omega.bounded_bbox()?.ok_or(GeomError::Degenerate("empty region".into()))?;
        let big = bb.expand(bb.diameter() + 1.0);
        let clip = b.clone().intersect(Region::rect(big.lo, big.hi));
        return normal_measure_boundary(omega, chi, &clip);
    }
    let curve = reduced_boundary_cut(b, omega)?;
    let e = integrate_curve(
        &|p, n| {
            let w = chi(p);
            [-w * n.x, -w * n.y]
        },
        &curve,
        Tol::new(1e-12, 1e-11),
        &[],
    );
    Ok(e.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub field: String,
    pub region: String,
    pub approximation: String,
    pub schedule: ScaleSchedule,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussReport {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub lhs_status: LimitStatus,
    pub rhs_status: LimitStatus,
    pub status: LimitStatus,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// (scale, pre-limit right-hand side) pairs.
    pub rhs_trace: Vec<(f64, f64)>,
    pub provenance: Provenance,
}

impl GaussReport {
    fn new(lhs: LimitResult, rhs: LimitResult, tol: f64, provenance: Provenance) -> Self {
        let residual = (lhs.value - rhs.value).abs();
        let status = if lhs.status != LimitStatus::Converged { lhs.status } else { rhs.status };
        GaussReport {
            lhs: lhs.value,
            rhs: rhs.value,
            lhs_error: lhs.error_bound,
            rhs_error: rhs.error_bound,
            lhs_status: lhs.status,
            rhs_status: rhs.status,
            status,
            residual,
            tol,
            pass: residual <= tol && status == LimitStatus::Converged,
            rhs_trace: rhs.trace,
            provenance,
        }
    }
}

fn field_options(f: &DMField, na: &NormalApproximation, rel: f64) -> RegionOptions<f64> {
    na.options(rel).with_points(&f.singular_points).with_lines(&f.singular_lines)
}

/// `lim_k integral over set of g F . (-D eta_k)`.
fn flux_limit(
    f: &DMField,
    na: &NormalApproximation,
    g: &dyn Fn(Point) -> f64,
    set: Option<&Region>,
) -> Result<LimitResult, NormalError> {
    let opts = field_options(f, na, na.quad_rel());
    let mut tr = LimitTracker::new(na.schedule);
    for i in 0..na.schedule.steps {
        let d = na.schedule.scale(i);
        let v = na.shell_pair(d, set, &opts, false, &|x, v| [g(x) * f.eval(x).dot(v), 0.0])?[0];
        if tr.push(d, v).is_some() {
            break;
        }
    }
    Ok(tr.finish())
}

fn provenance(f: &DMField, na: &NormalApproximation) -> Provenance {
    let mut notes = Vec::new();
    if f.class != Integrability::LInf {
        notes.push(format!("{} is not essentially bounded; singular points handled by excision", f.name()));
    }
    Provenance {
        field: f.name().to_string(),
        region: na.label.clone(),
        approximation: na.kind.name().to_string(),
        schedule: na.schedule,
        notes,
    }
}

/// Gauss formula `div F(int omega) + integral chi d(div F) = lim integral F . (-D eta_k)`.
pub fn gauss_check_bounded(f: &DMField, na: &NormalApproximation) -> Result<GaussReport, NormalError> {
    let dv = divergence_of(f, &na.omega, &|p| na.chi(p))?;
    let mut prov = provenance(f, na);
    for c in &dv.corner_atoms {
        prov.notes.push(format!("atom at corner ({}, {}) weighted by chi = {}", c.x, c.y, na.chi(*c)));
    }
    for (a, _) in &f.divergence.atoms {
        if !dv.corner_atoms.contains(a) && na.chi(*a) > 0.0 && !na.omega.contains(*a) {
            prov.notes.push(format!("boundary atom at ({}, {}) weighted by chi = {}", a.x, a.y, na.chi(*a)));
        }
    }
    let lhs = LimitResult { value: dv.value, error_bound: 1e-9, status: LimitStatus::Converged, trace: vec![] };
    let rhs = flux_limit(f, na, &|_| 1.0, None)?;
    Ok(GaussReport::new(lhs, rhs, GAUSS_TOL, prov))
}

/// Normal trace `B -> lim integral over B of F . (-D eta_k)` as a scalar measure.
pub fn normal_trace_bounded(f: &DMField, na: &NormalApproximation) -> Result<LimitMeasure, NormalError> {
    let ambient = neighborhood(&na.omega, na.schedule.initial * 2.0, Side::Outer)?;
    let (field, n) = (f.clone(), na.clone());
    let m = LimitMeasure::new(format!("normal-trace/{}", na.kind.name()), ambient, na.schedule, 1, move |g, set, c| {
        let opts = field_options(&field, &n, c.rel_tol);
        let v = n.shell_pair(c.scale, set, &opts, c.mode == Mode::Abs, &|x, v| [g(x) * field.eval(x).dot(v), 0.0])?;
        Ok(vec![v[0]])
    });
    Ok(m.with_quad_rel(na.quad_rel()))
}

/// Gauss formula for `g F` with `g` a simple function:
/// `integral chi d(div(g F)) = sum_i c_i nu_F(R_i)`, where
/// `div(1_R F) = 1_R div F - (F . n_R) H^1 on the boundary of R`.
pub fn gauss_bv_scalar(f: &DMField, g: &SimpleFunction, na: &NormalApproximation) -> Result<GaussReport, NormalError> {
    let trace = normal_trace_bounded(f, na)?;
    let chi = |p: Point| na.chi(p);
    let (mut lhs, mut rhs) = (0.0, 0.0);
    let mut err = 0.0;
    let mut status = LimitStatus::Converged;
    let mut rhs_trace = Vec::new();
    for (r, c) in &g.parts {
        let curve = reduced_boundary_cut(r, &na.omega)?;
        for s in &f.singular_points {
            if curve.nearest(*s).map_or(false, |(d, _)| d < 1e-9) {
                return Err(NormalError::SingularInterface { x: s.x, y: s.y });
            }
        }
        // Volume part: chi = 1 a.e. on omega and 0 off its closure.
        let mut vol = 0.0;
        if let Some(d) = &f.divergence.density {
            let piece = r.clone().intersect(na.omega.clone());
            vol += integrate_region(&|p| [d(p)], &piece, &RegionOptions::default())?.value[0];
        }
        for (a, w) in &f.divergence.atoms {
            if r.contains(*a) {
                vol += w * chi(*a);
            }
        }
        let jump = integrate_curve(&|p, n| [chi(p) * f.eval(p).dot(n)], &curve, Tol::new(1e-12, 1e-11), &[]);
        lhs += c * (vol - jump.value[0]);
        let t = trace.eval(r)?;
        rhs += c * t.value;
        err += c.abs() * t.error_bound;
        if t.status != LimitStatus::Converged {
            status = t.status;
        }
        rhs_trace.extend(t.trace.iter().map(|(s, v)| (*s, c * v)));
    }
    let l = LimitResult { value: lhs, error_bound: 1e-9, status: LimitStatus::Converged, trace: vec![] };
    let rr = LimitResult { value: rhs, error_bound: err, status, trace: rhs_trace };
    let mut prov = provenance(f, na);
    prov.notes.push(format!("simple function with {} pieces", g.parts.len()));
    Ok(GaussReport::new(l, rr, GAUSS_TOL, prov))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvReport {
    pub cells: usize,
    pub tv: TvBound,
    pub perimeter: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Grid partition of `a` by cells of side `h` aligned to `origin`.
pub fn aligned_partition(a: &Region, origin: Point, h: f64) -> Result<Vec<Region>, GeomError> {
    let bb = match a.bounded_bbox()? {
        Some(b) => b,
        None => return Ok(vec![]),
    };
    let i0 = ((bb.lo.x - origin.x) / h).floor() as i64;
    let i1 = ((bb.hi.x - origin.x) / h).ceil() as i64;
    let j0 = ((bb.lo.y - origin.y) / h).floor() as i64;
    let j1 = ((bb.hi.y - origin.y) / h).ceil() as i64;
    let mut out = Vec::new();
    for j in j0..j1 {
        for i in i0..i1 {
            let lo = Point::new(origin.x + i as f64 * h, origin.y + j as f64 * h);
            let cell = Region::rect(lo, lo + Point::new(h, h)).intersect(a.clone());
            if crate::quad::region_area(&cell).map_or(false, |v| v > 0.0) {
                out.push(cell);
            }
        }
    }
    Ok(out)
}

/// `|nu|(A) >= H^1(reduced boundary of omega inside A)` through a partition lower bound.
///
/// The grid is aligned to the lower-left corner of the bounding box of omega so corners
/// sit on cell vertices.
pub fn tv_lowerbound_check(na: &NormalApproximation, a: &Region, depth: u32) -> Result<TvReport, NormalError> {
    let bb = na.omega.bounded_bbox()?.ok_or(GeomError::Degenerate("empty region".into()))?;
    let h = (bb.hi.x - bb.lo.x).max(bb.hi.y - bb.lo.y) / f64::from(1u32 << depth);
    let cells = aligned_partition(a, bb.lo, h)?;
    let m = normal_measure_shell(na)?;
    let tv = tv_lower_bound(&m, &cells)?;
    let per = perimeter(&na.omega, Some(a))?;
    let tol = 1e-2;
    let pass = tv.skipped.is_empty() && tv.value >= per - tol;
    Ok(TvReport { cells: cells.len(), tv, perimeter: per, tol, pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Tangential,
    Atomic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessVerdict {
    /// `|F|` is not integrable against `|nu|`.
    NonIntegrable,
    Integrable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub thresholds: Vec<f64>,
    /// Ball whose diagonal chord carries the tangential mass.
    pub ball: (Point, f64),
    /// Ratio of consecutive annuli in the atomic lower sum.
    pub annulus_ratio: f64,
}

impl Default for WitnessParams {
    fn default() -> Self {
        WitnessParams { thresholds: vec![10.0, 100.0, 1000.0], ball: (Point::new(0.5, 0.5), 0.25), annulus_ratio: 0.98 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub threshold: f64,
    /// Tangential: `|nu|` mass bound. Atomic: lower sum of `integral min(|F|, M) d|nu|`.
    pub value: f64,
    /// Increment over the previous threshold (atomic only).
    pub increment: Option<f64>,
    /// Smallest `|F|` sampled on the test set (tangential only).
    pub field_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub verdict: WitnessVerdict,
    pub rows: Vec<WitnessRow>,
    /// Tangential: the diagonal length 1/2 bound. Atomic: (1/2 pi) ln 10 per decade.
    pub oracle: f64,
    pub pass: bool,
}

/// Certifies that `F` is not integrable against the normal measure.
///
/// Tangential: the strip `{dist(x, diagonal) < w}` inside the ball, `w = 1/(2M^2)`, lies where
/// `|F| >= M` and its normal-measure mass is bounded below by the chord length.
/// Atomic: one-edge lower sums over geometric annuli around the atom grow like
/// `(1/2 pi) ln M`.
pub fn nonintegrability_witness(
    f: &DMField,
    na: &NormalApproximation,
    kind: WitnessKind,
    params: &WitnessParams,
) -> Result<WitnessReport, NormalError> {
    if f.class == Integrability::LInf {
        return Ok(WitnessReport { kind, verdict: WitnessVerdict::Integrable, rows: vec![], oracle: 0.0, pass: true });
    }
    let chi = |p: Point| na.chi(p);
    match kind {
        WitnessKind::Tangential => {
            let line = *f.singular_lines.first().ok_or(GeomError::Degenerate("field has no singular line".into()))?;
            let (c, rho) = params.ball;
            let mut rows = Vec::new();
            let mut pass = true;
            for &m in &params.thresholds {
                let w = 1.0 / (2.0 * m * m);
                let strip = crate::fields::tube(&line, w).intersect(Region::disk(c, rho));
                let nu = normal_measure_boundary(&na.omega, &chi, &strip)?;
                let mass = nu[0].hypot(nu[1]);
                let field_min = strip_field_min(f, &line, w, c, rho);
                pass &= mass >= 0.5 - 1e-3 && field_min >= m;
                rows.push(WitnessRow { threshold: m, value: mass, increment: None, field_min: Some(field_min) });
            }
            let verdict = if pass { WitnessVerdict::NonIntegrable } else { WitnessVerdict::Inconclusive };
            Ok(WitnessReport { kind, verdict, rows, oracle: 0.5, pass })
        }
        WitnessKind::Atomic => {
            let (a, _) = *f.divergence.atoms.first().ok_or(GeomError::Degenerate("field has no atom".into()))?;
            let q = params.annulus_ratio;
            let reach = na.dist.boundary.pieces.iter().fold(f64::INFINITY, |m, p| {
                // Nearest boundary point not on a piece through the atom.
                if p.distance(a) < 1e-9 {
                    m
                } else {
                    m.min(p.distance(a))
                }
            });
            let r0 = 0.8 * reach.min(1.0);
            let m_max = params.thresholds.iter().fold(0.0f64, |x, y| x.max(*y));
            let r_stop = 1e-2 / (2.0 * PI * m_max);
            // Half plane on the side of the first boundary piece through the atom, cut along the
            // corner bisector.
            let normals: Vec<Point> = na
                .dist
                .boundary
                .pieces
                .iter()
                .filter(|p| p.distance(a) < 1e-9)
                .map(|p| p.normal_at(p.nearest(a).1))
                .collect();
            if normals.len() != 2 {
                return Err(GeomError::Degenerate("atom is not at a corner".into()).into());
            }
            let nrm = (normals[1] - normals[0]).normalized();
            let half = Region::half_plane(nrm, nrm.dot(a));
            let mut radii = vec![r0];
            while *radii.last().unwrap_or(&0.0) > r_stop {
                let r = radii.last().copied().unwrap_or(0.0) * q;
                radii.push(r);
            }
            let mut masses = Vec::with_capacity(radii.len() - 1);
            for w in radii.windows(2) {
                let ann = Region::disk(a, w[0]).minus(Region::disk(a, w[1])).intersect(half.clone());
                let nu = normal_measure_boundary(&na.omega, &chi, &ann)?;
                masses.push(nu[0].hypot(nu[1]));
            }
            let r_last = *radii.last().unwrap_or(&0.0);
            let mut rows: Vec<WitnessRow> = Vec::new();
            let oracle = LN_10 / (2.0 * PI);
            let mut pass = true;
            for &m in &params.thresholds {
                let mut s = 0.0;
                for (j, mass) in masses.iter().enumerate() {
                    let fr = f.eval(a + Point::new(radii[j], 0.0)).norm();
                    s += mass * fr.min(m);
                }
                // Below the last annulus min(|F|, M) = M and the edge mass is the radius.
                s += m * r_last;
                let increment = rows.last().map(|r| s - r.value);
                if let Some(inc) = increment {
                    pass &= (inc - oracle).abs() <= 0.05 * oracle;
                }
                rows.push(WitnessRow { threshold: m, value: s, increment, field_min: None });
            }
            let verdict = if pass { WitnessVerdict::NonIntegrable } else { WitnessVerdict::Inconclusive };
            Ok(WitnessReport { kind, verdict, rows, oracle, pass })
        }
    }
}

fn strip_field_min(f: &DMField, line: &SingularLine<f64>, w: f64, c: Point, rho: f64) -> f64 {
    let n = Point::new(-line.dir.y, line.dir.x).normalized();
    let mut min = f64::INFINITY;
    for i in 0..=64 {
        let t = -rho + 2.0 * rho * i as f64 / 64.0;
        let base = line.point + line.dir.normalized() * (line.dir.normalized().dot(c - line.point) + t);
        for s in [-1.0, 1.0] {
            let p = base + n * (s * w * (1.0 - 1e-12));
            if p.dist(c) < rho {
                min = min.min(f.eval(p).norm());
            }
        }
    }
    min
}
