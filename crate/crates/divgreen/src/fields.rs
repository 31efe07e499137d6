//! Closed-form divergence-measure fields with declared divergence measures.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fam::{FamError, ScalarFn};
use crate::geometry::{reduced_boundary, BoundaryCurve, GeomError};
use crate::quad::{
    integrate_curve, integrate_region, limit_extrapolate, LimitStatus, QuadError, RegionOptions, SingularLine, Tol,
};
use crate::{Point, Region, ScaleSchedule};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("unknown field fixture `{0}`")]
    UnknownFixture(String),
    #[error("field `{field}` is not in L^{p} on this region")]
    NotInClass { field: String, p: String },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Fam(#[from] FamError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Vortex,
    PointSource,
    DiagTangential,
    Constant,
    Linear,
    Polynomial,
}

impl FieldKind {
    pub const ALL: [FieldKind; 6] = [
        FieldKind::Vortex,
        FieldKind::PointSource,
        FieldKind::DiagTangential,
        FieldKind::Constant,
        FieldKind::Linear,
        FieldKind::Polynomial,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::Vortex => "vortex",
            FieldKind::PointSource => "point-source",
            FieldKind::DiagTangential => "diag-tangential",
            FieldKind::Constant => "constant",
            FieldKind::Linear => "linear",
            FieldKind::Polynomial => "polynomial",
        }
    }

    pub fn parse(s: &str) -> Result<Self, FieldError> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| FieldError::UnknownFixture(s.to_string()))
    }

    pub fn formula(&self) -> &'static str {
        match self {
            FieldKind::Vortex => "(y, -x) / (x^2 + y^2) about the centre; div = 0",
            FieldKind::PointSource => "(1/2pi) x / |x|^2 about the centre; div = atom of weight 1 at the centre",
            FieldKind::DiagTangential => "|x - y|^(-1/2) (1, 1) about the centre; div = 0",
            FieldKind::Constant => "the constant vector; div = 0",
            FieldKind::Linear => "x - centre; div = 2",
            FieldKind::Polynomial => "(x^2 y, x y^2 + y) about the centre; div = 4xy + 1",
        }
    }
}

/// Integrability class of a fixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrability {
    /// Locally integrable with a singularity.
    L1,
    /// Bounded on bounded sets.
    LInf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureParams {
    pub center: Point,
    /// Value of the constant field.
    pub vector: Point,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams { center: Point::origin(), vector: Point::new(1.0, 0.0) }
    }
}

/// Divergence measure: density, atoms and curve-concentrated parts.
#[derive(Clone)]
pub struct DivergenceMeasure {
    pub density: Option<ScalarFn>,
    pub atoms: Vec<(Point, f64)>,
    pub curves: Vec<(BoundaryCurve<f64>, ScalarFn)>,
}

impl std::fmt::Debug for DivergenceMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DivergenceMeasure")
            .field("density", &self.density.is_some())
            .field("atoms", &self.atoms)
            .field("curves", &self.curves.len())
            .finish()
    }
}

impl DivergenceMeasure {
    pub fn zero() -> Self {
        DivergenceMeasure { density: None, atoms: vec![], curves: vec![] }
    }

    pub fn density_at(&self, p: Point) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d(p))
    }

    /// `|div F|(r)`: integral of `|density|` plus atoms in `r` plus curve parts inside `r`.
    pub fn total_variation(&self, r: &Region) -> Result<f64, FieldError> {
        let mut tv = 0.0;
        if let Some(d) = &self.density {
            tv += integrate_region(&|p| [d(p).abs()], r, &RegionOptions::default())?.value[0];
        }
        tv += self.atoms.iter().filter(|(a, _)| r.contains(*a)).map(|(_, w)| w.abs()).sum::<f64>();
        for (c, rho) in &self.curves {
            let e = integrate_curve(&|p, _| [if r.contains(p) { rho(p).abs() } else { 0.0 }], c, Tol::new(1e-10, 1e-10), &[]);
            tv += e.value[0];
        }
        Ok(tv)
    }
}

/// A closed-form vector field with its declared divergence.
#[derive(Clone, Debug)]
pub struct DMField {
    pub kind: FieldKind,
    pub params: FixtureParams,
    pub singular_points: Vec<Point>,
    pub singular_lines: Vec<SingularLine<f64>>,
    pub divergence: DivergenceMeasure,
    pub class: Integrability,
}

impl DMField {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn eval(&self, p: Point) -> Point {
        let c = self.params.center;
        let q = p - c;
        match self.kind {
            FieldKind::Vortex => Point::new(q.y, -q.x) * q.norm2().recip(),
            FieldKind::PointSource => q * (1.0 / (2.0 * PI * q.norm2())),
            FieldKind::DiagTangential => {
                let s = (q.x - q.y).abs().sqrt().recip();
                Point::new(s, s)
            }
            FieldKind::Constant => self.params.vector,
            FieldKind::Linear => q,
            FieldKind::Polynomial => Point::new(q.x * q.x * q.y, q.x * q.y * q.y + q.y),
        }
    }

    /// Jacobian `[[dF1/dx, dF1/dy], [dF2/dx, dF2/dy]]` off the singular set.
    pub fn jacobian(&self, p: Point) -> [[f64; 2]; 2] {
        let q = p - self.params.center;
        match self.kind {
            FieldKind::Vortex => {
                let r2 = q.norm2();
                let r4 = r2 * r2;
                [[-2.0 * q.x * q.y / r4, (q.x * q.x - q.y * q.y) / r4], [(q.x * q.x - q.y * q.y) / r4, 2.0 * q.x * q.y / r4]]
            }
            FieldKind::PointSource => {
                let r2 = q.norm2();
                let k = 1.0 / (2.0 * PI * r2 * r2);
                [[k * (q.y * q.y - q.x * q.x), -2.0 * k * q.x * q.y], [-2.0 * k * q.x * q.y, k * (q.x * q.x - q.y * q.y)]]
            }
            FieldKind::DiagTangential => {
                let t = q.x - q.y;
                let d = -0.5 * t.signum() * t.abs().powf(-1.5);
                [[d, -d], [d, -d]]
            }
            FieldKind::Constant => [[0.0, 0.0], [0.0, 0.0]],
            FieldKind::Linear => [[1.0, 0.0], [0.0, 1.0]],
            FieldKind::Polynomial => [[2.0 * q.x * q.y, q.x * q.x], [q.y * q.y, 2.0 * q.x * q.y + 1.0]],
        }
    }

    /// Pointwise divergence off the singular set.
    pub fn pointwise_divergence(&self, p: Point) -> f64 {
        let j = self.jacobian(p);
        j[0][0] + j[1][1]
    }

    /// Supremum of `|F|` on `r` by sampling, or `None` for fields unbounded there.
    pub fn sup_norm(&self, r: &Region) -> Result<Option<f64>, FieldError> {
        let bb = match r.bounded_bbox()? {
            Some(b) => b,
            None => return Ok(Some(0.0)),
        };
        let near_singular = self.singular_points.iter().any(|s| closure_contains(r, *s))
            || self.singular_lines.iter().any(|l| line_meets(r, l));
        if near_singular {
            return Ok(None);
        }
        let n = 200;
        let mut sup: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let p = Point::new(
                    bb.lo.x + (bb.hi.x - bb.lo.x) * i as f64 / n as f64,
                    bb.lo.y + (bb.hi.y - bb.lo.y) * j as f64 / n as f64,
                );
                sup = sup.max(self.eval(p).norm());
            }
        }
        Ok(Some(sup))
    }

    pub fn region_options(&self) -> RegionOptions<f64> {
        RegionOptions::default().with_points(&self.singular_points).with_lines(&self.singular_lines)
    }
}

fn closure_contains(r: &Region, p: Point) -> bool {
    if r.contains(p) {
        return true;
    }
    // Closure test through a tiny ball density.
    crate::geometry::density_at(r, p, 1e-9).map_or(false, |d| d > 0.0)
}

fn line_meets(r: &Region, l: &SingularLine<f64>) -> bool {
    let n = Point::new(-l.dir.y, l.dir.x).normalized();
    let off = n.dot(l.point);
    let slab = Region::half_plane(n, off + 1e-9).intersect(Region::half_plane(-n, -off + 1e-9));
    let meet = r.clone().intersect(slab);
    crate::quad::region_area(&meet).map_or(false, |a| a > 0.0)
}

/// Field fixture by name.
pub fn fixture(name: &str, params: FixtureParams) -> Result<DMField, FieldError> {
    let kind = FieldKind::parse(name)?;
    let c = params.center;
    let zero = DivergenceMeasure::zero;
    let f = match kind {
        FieldKind::Vortex => DMField {
            kind,
            params,
            singular_points: vec![c],
            singular_lines: vec![],
            divergence: zero(),
            class: Integrability::L1,
        },
        FieldKind::PointSource => DMField {
            kind,
            params,
            singular_points: vec![c],
            singular_lines: vec![],
            divergence: DivergenceMeasure { density: None, atoms: vec![(c, 1.0)], curves: vec![] },
            class: Integrability::L1,
        },
        FieldKind::DiagTangential => DMField {
            kind,
            params,
            singular_points: vec![],
            singular_lines: vec![SingularLine { point: c, dir: Point::new(1.0, 1.0).normalized() }],
            divergence: zero(),
            class: Integrability::L1,
        },
        FieldKind::Constant | FieldKind::Linear | FieldKind::Polynomial => {
            let divergence = match kind {
                FieldKind::Linear => DivergenceMeasure { density: Some(Arc::new(|_| 2.0)), atoms: vec![], curves: vec![] },
                FieldKind::Polynomial => DivergenceMeasure {
                    density: Some(Arc::new(move |p: Point| 4.0 * (p.x - c.x) * (p.y - c.y) + 1.0)),
                    atoms: vec![],
                    curves: vec![],
                },
                _ => zero(),
            };
            DMField { kind, params, singular_points: vec![], singular_lines: vec![], divergence, class: Integrability::LInf }
        }
    };
    Ok(f)
}

/// Smooth compactly supported test function `exp(1 - 1/(1 - |x-c|^2/r^2))`, equal to 1 at `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Point,
    pub radius: f64,
}

impl Bump {
    pub fn value(&self, p: Point) -> f64 {
        let s = (p - self.center).norm2() / (self.radius * self.radius);
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s)).exp()
        }
    }

    pub fn gradient(&self, p: Point) -> Point {
        let d = p - self.center;
        let r2 = self.radius * self.radius;
        let s = d.norm2() / r2;
        if s >= 1.0 {
            return Point::origin();
        }
        let v = (1.0 - 1.0 / (1.0 - s)).exp();
        // d/dp exp(1 - 1/(1-s)) = v * (-1/(1-s)^2) * ds/dp, ds/dp = 2 d / r^2.
        d * (-v / ((1.0 - s) * (1.0 - s)) * 2.0 / r2)
    }

    pub fn support(&self) -> Region {
        Region::disk(self.center, self.radius)
    }
}

/// Nine bumps on a 3x3 grid over the bounding box, each supported inside `ambient`.
pub fn standard_bumps(ambient: &Region) -> Result<Vec<Bump>, FieldError> {
    let bb = ambient.bounded_bbox()?.ok_or(GeomError::Degenerate("empty ambient set".into()))?;
    let w = bb.hi.x - bb.lo.x;
    let h = bb.hi.y - bb.lo.y;
    let r = 0.2 * w.min(h);
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let c = Point::new(bb.lo.x + w * (i as f64 + 1.0) / 4.0, bb.lo.y + h * (j as f64 + 1.0) / 4.0);
            let mut rad = r;
            // Shrink until the support sits inside the ambient set.
            while rad > 1e-3 * r {
                if crate::geometry::signed_distance(ambient, c)?.value <= -rad * 1.01 {
                    out.push(Bump { center: c, radius: rad });
                    break;
                }
                rad *= 0.5;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    pub bump: Bump,
    /// `integral of F . D phi`.
    pub lhs: f64,
    /// `- integral of phi d(div F)`.
    pub rhs: f64,
    pub residual: f64,
    pub status: LimitStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakReport {
    pub field: String,
    pub residuals: Vec<WeakResidual>,
    pub max_residual: f64,
    pub pass: bool,
}

/// `integral of phi d(div F)` over the whole plane.
pub fn pair_with_divergence(f: &DMField, phi: &dyn Fn(Point) -> f64, support: &Region) -> Result<f64, FieldError> {
    let mut s = 0.0;
    if let Some(d) = &f.divergence.density {
        s += integrate_region(&|p| [phi(p) * d(p)], support, &RegionOptions::default())?.value[0];
    }
    s += f.divergence.atoms.iter().map(|(a, w)| w * phi(*a)).sum::<f64>();
    for (c, rho) in &f.divergence.curves {
        s += integrate_curve(&|p, _| [phi(p) * rho(p)], c, Tol::new(1e-10, 1e-10), &[]).value[0];
    }
    Ok(s)
}

/// Strip of half-width `delta` around a singular line.
pub fn tube(l: &SingularLine<f64>, delta: f64) -> Region {
    let n = Point::new(-l.dir.y, l.dir.x).normalized();
    let off = n.dot(l.point);
    Region::half_plane(n, off + delta).intersect(Region::half_plane(-n, -off + delta))
}

/// `integral over r of F . G` where singular lines of `F` are excised by shrinking tubes.
pub fn integrate_against(
    f: &DMField,
    g: &(dyn Fn(Point) -> Point + Sync),
    r: &Region,
    schedule: &ScaleSchedule,
) -> Result<(f64, LimitStatus), FieldError> {
    let (v, _, s) = integrate_against_with(f, g, r, schedule, &RegionOptions::default().with_points(&f.singular_points).with_tol(1e-9, 1e-10))?;
    Ok((v, s))
}

/// [`integrate_against`] with explicit quadrature options (extra break lines, tolerances).
pub fn integrate_against_with(
    f: &DMField,
    g: &(dyn Fn(Point) -> Point + Sync),
    r: &Region,
    schedule: &ScaleSchedule,
    opts: &RegionOptions<f64>,
) -> Result<(f64, f64, LimitStatus), FieldError> {
    let lines: Vec<&SingularLine<f64>> = f.singular_lines.iter().filter(|l| line_meets(r, l)).collect();
    let integrand = |p: Point| [f.eval(p).dot(g(p))];
    if lines.is_empty() {
        let e = integrate_region(&integrand, r, opts)?;
        return Ok((e.value[0], e.error, e.status));
    }
    let mut err = None;
    let res = limit_extrapolate(
        |d| {
            let mut cut = r.clone();
            for l in &lines {
                cut = cut.minus(tube(l, d));
            }
            match integrate_region(&integrand, &cut, opts) {
                Ok(e) => e.value[0],
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        schedule,
    );
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok((res.value, res.error_bound, res.status))
}

/// Weak-divergence residuals `|integral F . D phi + integral phi d(div F)|`.
pub fn verify_weak_divergence(f: &DMField, ambient: &Region, tests: &[Bump], tol: f64) -> Result<WeakReport, FieldError> {
    let sched = ScaleSchedule::default().with_tol(tol * 1e-2);
    let mut residuals = Vec::new();
    for b in tests {
        let (lhs, status) = integrate_against(f, &|p| b.gradient(p), &b.support().intersect(ambient.clone()), &sched)?;
        let rhs = -pair_with_divergence(f, &|p| b.value(p), &b.support())?;
        residuals.push(WeakResidual { bump: *b, lhs, rhs, residual: (lhs - rhs).abs(), status });
    }
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.residual));
    let pass = residuals.iter().all(|r| r.residual <= tol && r.status == LimitStatus::Converged);
    Ok(WeakReport { field: f.name().to_string(), residuals, max_residual, pass })
}

/// `||F||_{L^p(ambient)} + |div F|(ambient)` for `p` in {1, infinity}.
pub fn dm_norm(f: &DMField, ambient: &Region, p: Integrability) -> Result<f64, FieldError> {
    let lp = match p {
        Integrability::L1 => {
            let (v, status) = integrate_against_norm(f, ambient)?;
            if status == LimitStatus::Diverging {
                return Err(FieldError::NotInClass { field: f.name().into(), p: "1".into() });
            }
            v
        }
        Integrability::LInf => f
            .sup_norm(ambient)?
            .ok_or_else(|| FieldError::NotInClass { field: f.name().into(), p: "infinity".into() })?,
    };
    Ok(lp + f.divergence.total_variation(ambient)?)
}

fn integrate_against_norm(f: &DMField, r: &Region) -> Result<(f64, LimitStatus), FieldError> {
    let opts = RegionOptions::default().with_points(&f.singular_points).with_lines(&f.singular_lines);
    match integrate_region(&|p| [f.eval(p).norm()], r, &opts) {
        Ok(e) => Ok((e.value[0], e.status)),
        Err(QuadError::Diverging { .. }) => Ok((f64::INFINITY, LimitStatus::Diverging)),
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceValue {
    pub value: f64,
    /// Atoms sitting on corners of the region's boundary; they were weighted by the
    /// classifier's value at the corner.
    pub corner_atoms: Vec<Point>,
}

/// `div F(int* A) + integral of chi d(div F)` over the boundary: the density over `A`, atoms
/// weighted by `chi`, and curve parts weighted by `chi`.
pub fn divergence_of(f: &DMField, a: &Region, chi: &dyn Fn(Point) -> f64) -> Result<DivergenceValue, FieldError> {
    let mut value = 0.0;
    if let Some(d) = &f.divergence.density {
        value += integrate_region(&|p| [d(p)], a, &RegionOptions::default())?.value[0];
    }
    let corners = reduced_boundary(a, None)?.corners;
    let mut corner_atoms = Vec::new();
    for (p, w) in &f.divergence.atoms {
        value += w * chi(*p);
        if corners.iter().any(|c| c.dist(*p) < 1e-12) {
            corner_atoms.push(*p);
        }
    }
    for (c, rho) in &f.divergence.curves {
        value += integrate_curve(&|p, _| [chi(p) * rho(p)], c, Tol::new(1e-10, 1e-10), &[]).value[0];
    }
    Ok(DivergenceValue { value, corner_atoms })
}

/// Indicator-style classifier of the open set: 1 inside, the ball density on the boundary.
pub fn density_classifier(a: &Region) -> impl Fn(Point) -> f64 + '_ {
    move |p| {
        if a.contains(p) {
            1.0
        } else {
            crate::geometry::density_at(a, p, 1e-9).unwrap_or(0.0)
        }
    }
}
