//! The acceptance criteria as report-producing checks.

use std::error::Error;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use divgreen::fam::{area_measure, aura_check, core_estimate, density_measure, sigma_additivity_check, strip_family, AuraVerdict};
use divgreen::fields::{fixture, FixtureParams};
use divgreen::normal::{
    gauss_check_bounded, make_approximation, nonintegrability_witness, normal_measure_boundary, normal_measure_shell,
    tv_lowerbound_check, ApproxKind, WitnessKind, WitnessParams, WitnessVerdict,
};
use divgreen::quad::LimitStatus;
use divgreen::trace::{
    box_bubble, decade_schedule, lipschitz_bound, product, pure_part_detector, shell_gradient_limit, shell_gradient_term,
    silhavy_trace, smooth_fixtures, CompactSet, Lipschitz, PurePart, Ramp, TraceError, TRACE_TOL,
};
use divgreen::{Point, Region, ScaleSchedule};

use crate::config::RunConfig;
use crate::report::{CriterionSummary, Record, Report, Series};

type CheckResult = Result<Vec<Record>, Box<dyn Error>>;

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub anchor: &'static str,
    pub budget: Duration,
    /// Part of the quick suite.
    pub quick: bool,
    check: fn(&RunConfig) -> CheckResult,
}

pub struct Outcome {
    pub records: Vec<Record>,
    pub pass: bool,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn run(&self, cfg: &RunConfig) -> Outcome {
        let t = Instant::now();
        let mut records = match (self.check)(cfg) {
            Ok(r) => r,
            Err(e) => vec![Record::error(self.name, self.anchor, e)],
        };
        for r in &mut records {
            r.criterion = Some(self.id);
        }
        let pass = !records.is_empty() && records.iter().all(|r| r.pass);
        Outcome { records, pass, elapsed: t.elapsed() }
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "vortex-strip-sums",
        anchor: "vortex strip sums S_k >= (1/2) ln(k^2 + 1), increasing without bound",
        budget: secs(10),
        quick: true,
        check: vortex_strip_sums,
    },
    Criterion {
        id: 2,
        name: "point-source-strip-sums",
        anchor: "point-source strip sums S_k -> 1/2",
        budget: secs(10),
        quick: true,
        check: point_source_strip_sums,
    },
    Criterion {
        id: 3,
        name: "density-at-zero",
        anchor: "density at zero: mu(A) = limit of |A n B(0,r)| / |B(0,r)|",
        budget: secs(5),
        quick: true,
        check: density_at_zero,
    },
    Criterion {
        id: 4,
        name: "route-agreement",
        anchor: "nu(B) = -lim integral_B D eta_k = -integral over the reduced boundary of B of chi n_B",
        budget: secs(60),
        quick: false,
        check: route_agreement,
    },
    Criterion {
        id: 5,
        name: "gauss-residuals",
        anchor: "div F(int omega) + integral chi d(div F) = lim integral F . (-D eta_k)",
        budget: secs(120),
        quick: false,
        check: gauss_residuals,
    },
    Criterion {
        id: 6,
        name: "tv-lower-bound",
        anchor: "|nu|(A) >= H^1(reduced boundary of omega inside A)",
        budget: secs(30),
        quick: true,
        check: tv_lower_bound,
    },
    Criterion {
        id: 7,
        name: "non-integrability",
        anchor: "|F| is not integrable against |nu| for unbounded fields",
        budget: secs(60),
        quick: false,
        check: non_integrability,
    },
    Criterion {
        id: 8,
        name: "aura-certificate",
        anchor: "B(0, 1/k) is an aura sequence of the density at zero; its core is the origin",
        budget: secs(30),
        quick: true,
        check: aura_certificate,
    },
    Criterion {
        id: 9,
        name: "trace-functional",
        anchor: "N(f) = integral f d(div F) + integral F . Df, |N(f)| <= ||F||_DM Lc(f)",
        budget: secs(60),
        quick: false,
        check: trace_functional,
    },
    Criterion {
        id: 10,
        name: "lipschitz-lemma",
        anchor: "|f(x) - f(y)| <= 2(m + 2) sup |Df| |x - y| on path-connected compact sets",
        budget: secs(30),
        quick: true,
        check: lipschitz_lemma,
    },
    Criterion {
        id: 11,
        name: "pure-part-classifier",
        anchor: "the normal trace is a Radon measure iff (1/delta) integral over the inner layer of |F . n| stays bounded",
        budget: secs(10),
        quick: true,
        check: classifier,
    },
];

pub const SUITES: &[&str] = &["acceptance", "quick"];

pub fn criteria(suite: &str) -> Option<Vec<&'static Criterion>> {
    match suite {
        "acceptance" => Some(CRITERIA.iter().collect()),
        "quick" => Some(CRITERIA.iter().filter(|c| c.quick).collect()),
        _ => None,
    }
}

/// Runs a suite; `progress` sees each criterion as it finishes.
pub fn run_suite(suite: &str, cfg: &RunConfig, mut progress: impl FnMut(&Criterion, &Outcome)) -> Option<Report> {
    let list = criteria(suite)?;
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for c in list {
        let o = c.run(cfg);
        progress(c, &o);
        summaries.push(CriterionSummary { id: c.id, name: c.name.to_string(), pass: o.pass });
        records.extend(o.records);
    }
    let mut rep = Report::new(format!("suite {suite}"), cfg, records);
    rep.criteria = summaries;
    Some(rep)
}

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn field(name: &str) -> Result<divgreen::fields::DMField, Box<dyn Error>> {
    Ok(fixture(name, FixtureParams::default())?)
}

fn field_at(name: &str, c: Point) -> Result<divgreen::fields::DMField, Box<dyn Error>> {
    Ok(fixture(name, FixtureParams { center: c, ..FixtureParams::default() })?)
}

fn tall_box() -> Region {
    Region::rect(p(0.0, -1.0), p(1.0, 1.0))
}

// Closed forms by direct antiderivatives of the strip integrands.
fn vortex_oracle(k: f64) -> f64 {
    let x = 1.0 / k;
    k * (0.5 * x * (1.0 + 1.0 / (x * x)).ln() + x.atan())
}

fn point_source_oracle(k: f64) -> f64 {
    let x = 1.0 / k;
    k / PI * (x * (1.0 / x).atan() + 0.5 * (1.0 + x * x).ln())
}

const KS: [f64; 3] = [10.0, 100.0, 1000.0];

fn vortex_strip_sums(_: &RunConfig) -> CheckResult {
    let v = field("vortex")?;
    let one = Lipschitz::constant(1.0);
    let bx = Region::unit_box();
    let mut out = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for k in KS {
        let s = shell_gradient_term(&v, &bx, &one, &Ramp::axis(), 1.0 / k)?;
        let oracle = vortex_oracle(k);
        let lower = 0.5 * (k * k + 1.0).ln();
        let rel = ((s - oracle) / oracle).abs();
        out.push(
            Record::new(format!("vortex-strip-sum-k{k}"), "S_k >= (1/2) ln(k^2 + 1)")
                .sides(s, oracle, 1e-6 * oracle)
                .value("k", k)
                .value("lower_bound", lower)
                .value("relative_error", rel)
                .value("increasing", s > last)
                .pass(rel <= 1e-6 && s >= lower && s > last),
        );
        last = s;
    }
    let r = shell_gradient_limit(&v, &bx, &one, &Ramp::axis(), &decade_schedule())?;
    out.push(
        Record::new("vortex-strip-sum-limit", "S_k has no finite limit")
            .value("last", r.trace.last().map_or(f64::NAN, |t| t.1))
            .limit_status(r.status)
            .series(Series::from_trace("S_k", &r.trace))
            .pass(r.status == LimitStatus::Diverging),
    );
    Ok(out)
}

fn point_source_strip_sums(_: &RunConfig) -> CheckResult {
    let f = field("point-source")?;
    let one = Lipschitz::constant(1.0);
    let omega = tall_box();
    let mut out = Vec::new();
    for k in KS {
        let s = shell_gradient_term(&f, &omega, &one, &Ramp::axis(), 1.0 / k)?;
        let tol = 1.0 / (2.0 * PI * k) + 1e-4;
        let oracle = point_source_oracle(k);
        out.push(
            Record::new(format!("point-source-strip-sum-k{k}"), "|S_k - 1/2| <= 1/(2 pi k)")
                .sides(s, 0.5, tol)
                .value("k", k)
                .value("closed_form", oracle)
                .value("quadrature_error", (s - oracle).abs())
                .pass((s - 0.5).abs() <= tol && (s - oracle).abs() <= 1e-6),
        );
    }
    let r = shell_gradient_limit(&f, &omega, &one, &Ramp::axis(), &decade_schedule())?;
    out.push(
        Record::new("point-source-strip-sum-limit", "S_k -> 1/2")
            .sides(r.value, 0.5, 1e-4)
            .value("error_bound", r.error_bound)
            .limit_status(r.status)
            .series(Series::from_trace("S_k", &r.trace))
            .pass(r.converged() && (r.value - 0.5).abs() <= 1e-4),
    );
    Ok(out)
}

fn origin_density() -> Result<divgreen::fam::LimitMeasure, Box<dyn Error>> {
    Ok(density_measure(Point::origin(), Region::unit_disk(), ScaleSchedule::default())?)
}

fn density_at_zero(_: &RunConfig) -> CheckResult {
    let m = origin_density()?;
    let mut out = Vec::new();
    for (label, theta) in [("pi/2", PI / 2.0), ("pi", PI), ("3pi/2", 1.5 * PI)] {
        let r = m.eval(&Region::sector(Point::origin(), 2.0, 0.0, theta))?;
        let oracle = theta / (2.0 * PI);
        out.push(
            Record::new(format!("sector-{label}"), "mu(sector of angle theta) = theta / 2pi")
                .sides(r.value, oracle, 1e-3)
                .value("theta", theta)
                .limit_status(r.status)
                .series(Series::from_trace("density", &r.trace))
                .pass(r.converged() && (r.value - oracle).abs() <= 1e-3),
        );
    }
    let fam = strip_family(12);
    let union = Region::rect(p(0.0, -1.0), p(0.5, 1.0));
    let rep = sigma_additivity_check(&m, &fam, &union)?;
    let max_part = rep.parts.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    out.push(
        Record::new("strip-family", "mu(A_j) = 0 for every strip while mu(union) = 1/2")
            .sides(rep.union_value, 0.5, 1e-3)
            .value("strips", rep.parts.len())
            .value("max_part", max_part)
            .value("sum_of_parts", rep.sum_of_parts)
            .value("sigma_additivity_violated", rep.violated)
            .pass(max_part <= 1e-6 && (rep.union_value - 0.5).abs() <= 1e-3 && rep.violated),
    );
    Ok(out)
}

fn route_agreement(cfg: &RunConfig) -> CheckResult {
    let domains = [
        ("unit-square", Region::unit_box(), ApproxKind::OuterPortmanteau),
        ("unit-disk", Region::unit_disk(), ApproxKind::DistanceRamp),
        ("quarter-disk", Region::quarter_disk(), ApproxKind::InnerPortmanteau),
    ];
    let tests = [
        ("half-plane-x>0.3", Region::half_plane(p(-1.0, 0.0), -0.3)),
        ("half-plane-y<0.2", Region::half_plane(p(0.0, 1.0), 0.2)),
        ("band-0.2<y<0.6", Region::rect(p(-2.0, 0.2), p(2.0, 0.6))),
        ("band-0.1<x<0.35", Region::rect(p(0.1, -2.0), p(0.35, 2.0))),
    ];
    let mut out = Vec::new();
    for (dn, omega, kind) in domains {
        let na = make_approximation(&omega, kind, cfg.approx_params())?;
        let nu = normal_measure_shell(&na)?;
        for (tn, b) in &tests {
            let s = nu.eval_vec(b)?;
            let t = normal_measure_boundary(&omega, &|x| na.chi(x), b)?;
            let d = (s[0].value - t[0]).abs().max((s[1].value - t[1]).abs());
            let converged = s.iter().all(|r| r.converged());
            out.push(
                Record::new(format!("routes-{dn}-{tn}"), "shell limit = boundary integral, componentwise")
                    .value("approximation", kind.name())
                    .value("shell", vec![s[0].value, s[1].value])
                    .value("boundary", t.to_vec())
                    .value("difference", d)
                    .value("tol", 1e-3)
                    .limit_status(if s[0].converged() { s[1].status } else { s[0].status })
                    .pass(converged && d <= 1e-3),
            );
        }
    }
    Ok(out)
}

fn gauss_record(name: String, anchor: &str, r: &divgreen::normal::GaussReport) -> Record {
    Record::new(name, anchor)
        .sides(r.lhs, r.rhs, r.tol)
        .value("residual", r.residual)
        .value("lhs_error", r.lhs_error)
        .value("rhs_error", r.rhs_error)
        .value("lhs_status", r.lhs_status.as_str())
        .value("rhs_status", r.rhs_status.as_str())
        .value("approximation", r.provenance.approximation.clone())
        .value("notes", r.provenance.notes.clone())
        .limit_status(r.status)
        .series(Series::from_trace("rhs", &r.rhs_trace))
}

fn gauss_residuals(cfg: &RunConfig) -> CheckResult {
    let mut out = Vec::new();
    for (rn, omega) in [("unit-square", Region::unit_box()), ("unit-disk", Region::unit_disk())] {
        for kind in ApproxKind::ALL {
            let na = make_approximation(&omega, kind, cfg.approx_params())?;
            for f in ["linear", "polynomial"] {
                let r = gauss_check_bounded(&field(f)?, &na)?;
                let pass = r.pass;
                out.push(
                    gauss_record(format!("gauss-{f}-{rn}-{}", kind.name()), "|lhs - rhs| <= 1e-3", &r).pass(pass),
                );
            }
        }
    }
    let na = make_approximation(&Region::unit_box(), ApproxKind::CanonicalMollified, cfg.approx_params())?;
    let r = gauss_check_bounded(&field_at("point-source", p(0.5, 0.0))?, &na)?;
    let pass = r.pass && (r.lhs - 0.5).abs() <= 1e-3 && (r.rhs - 0.5).abs() <= 1e-3;
    out.push(
        gauss_record("gauss-half-weight-atom".into(), "an atom on a flat edge is weighed by its density 1/2", &r)
            .value("oracle", 0.5)
            .pass(pass),
    );
    Ok(out)
}

fn tv_lower_bound(cfg: &RunConfig) -> CheckResult {
    let bx = Region::unit_box();
    let na = make_approximation(&bx, ApproxKind::OuterPortmanteau, cfg.approx_params())?;
    let sets = [
        ("all", Region::rect(p(-0.5, -0.5), p(1.5, 1.5)), 2),
        ("corner-ball", Region::disk(Point::origin(), 0.3), 3),
        ("edge-band", Region::rect(p(0.8, 0.2), p(1.2, 0.8)), 3),
    ];
    let mut out = Vec::new();
    for (name, a, depth) in sets {
        let r = tv_lowerbound_check(&na, &a, depth)?;
        out.push(
            Record::new(format!("tv-{name}"), "partition TV of nu >= H^1(reduced boundary in A) - 1e-2")
                .sides(r.tv.value, r.perimeter, r.tol)
                .value("cells", r.cells)
                .value("skipped_cells", r.tv.skipped.len())
                .pass(r.pass),
        );
    }
    Ok(out)
}

fn non_integrability(cfg: &RunConfig) -> CheckResult {
    let mut out = Vec::new();
    let ball = Region::disk(p(0.5, 0.5), 0.25);
    let omega = Region::half_plane(p(1.0, -1.0).normalized(), 0.0).intersect(ball);
    let na = make_approximation(&omega, ApproxKind::OuterPortmanteau, cfg.approx_params())?;
    let params = WitnessParams { thresholds: vec![10.0, 100.0], ..WitnessParams::default() };
    let r = nonintegrability_witness(&field("diag-tangential")?, &na, WitnessKind::Tangential, &params)?;
    for row in &r.rows {
        out.push(
            Record::new(format!("tangential-M{}", row.threshold), "|nu|({|F| >= M}) >= 1/2 for every M")
                .sides(row.value, 0.5, 1e-3)
                .value("threshold", row.threshold)
                .value("field_min", row.field_min.unwrap_or(f64::NAN))
                .status(serde_json::to_value(r.verdict)?.as_str().unwrap_or("unknown"))
                .pass(row.value >= 0.5 - 1e-3 && row.field_min.map_or(false, |m| m >= row.threshold)),
        );
    }
    let quarter = Region::disk(Point::origin(), 0.5).intersect(Region::unit_box());
    let na = make_approximation(&quarter, ApproxKind::CanonicalMollified, cfg.approx_params())?;
    let r = nonintegrability_witness(&field("point-source")?, &na, WitnessKind::Atomic, &WitnessParams::default())?;
    let oracle = 10f64.ln() / (2.0 * PI);
    let points: Vec<[f64; 2]> = r.rows.iter().map(|w| [w.threshold, w.value]).collect();
    for row in &r.rows {
        if let Some(inc) = row.increment {
            out.push(
                Record::new(format!("atomic-increment-M{}", row.threshold), "integral min(|F|, M) d|nu| grows by (1/2pi) ln 10 per decade")
                    .sides(inc, oracle, 0.05 * oracle)
                    .value("threshold", row.threshold)
                    .value("lower_sum", row.value)
                    .pass((inc - oracle).abs() <= 0.05 * oracle),
            );
        }
    }
    out.push(
        Record::new("atomic-verdict", "an atom on the boundary makes |F| non-integrable against |nu|")
            .value("verdict", serde_json::to_value(r.verdict)?)
            .series(Series { x: "M".into(), y: "lower_sum".into(), points })
            .pass(r.verdict == WitnessVerdict::NonIntegrable),
    );
    Ok(out)
}

fn aura_certificate(_: &RunConfig) -> CheckResult {
    let m = origin_density()?;
    let seq: Vec<Region> =
        [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|k| Region::disk(Point::origin(), 1.0 / k)).collect();
    let lam = area_measure(Region::unit_disk());
    let cert = aura_check(&m, &seq, &lam)?;
    let max_complement = cert.complement_mass.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mass_dev = cert.mass.iter().fold(0.0f64, |a, v| a.max((v - 1.0).abs()));
    let lambda_last = cert.lambda.last().copied().unwrap_or(f64::NAN);
    let mut out = vec![Record::new("aura-balls", "lambda(A_k) -> 0, |mu|(complement of A_k) = 0, mu(A_k) = 1")
        .value("lambda", cert.lambda.clone())
        .value("complement_mass", cert.complement_mass.clone())
        .value("mass", cert.mass.clone())
        .value("verdict", serde_json::to_value(cert.verdict)?)
        .pass(
            cert.verdict == AuraVerdict::PureSupported
                && max_complement <= 1e-6
                && mass_dev <= 1e-3
                && lambda_last <= 1e-3,
        )];
    let cells = core_estimate(&m, 6)?;
    let adjacent = cells.iter().all(|c| c.lo.x <= 0.0 && c.lo.y <= 0.0 && c.hi.x >= 0.0 && c.hi.y >= 0.0);
    out.push(
        Record::new("core-depth-6", "the core of the density at zero is the origin")
            .value("cells", cells.len())
            .value("bounds", cells.iter().map(|c| vec![c.lo.x, c.lo.y, c.hi.x, c.hi.y]).collect::<Vec<_>>())
            .pass(!cells.is_empty() && adjacent),
    );
    Ok(out)
}

fn trace_functional(_: &RunConfig) -> CheckResult {
    let mut out = Vec::new();
    let names = ["vortex", "point-source", "diag-tangential", "constant", "linear", "polynomial"];
    let omega = Region::disk(p(0.2, 0.1), 0.7);
    for name in names {
        let f = field(name)?;
        for g in smooth_fixtures() {
            let t = silhavy_trace(&f, &omega, &g)?;
            out.push(
                Record::new(format!("trace-bound-{name}-{}", g.name), "|N(f)| <= ||F||_DM Lc(f) + 1e-3")
                    .sides(t.value.abs(), t.bound, TRACE_TOL)
                    .value("dm_norm", t.dm_norm)
                    .value("lc_norm", t.lc_norm)
                    .limit_status(t.status)
                    .pass(t.within_bound),
            );
        }
    }
    let bx = Region::unit_box();
    let zero_data = [
        ("boundary-ramp", Lipschitz::boundary_ramp(&bx, 0.25)?),
        ("bubble", box_bubble()),
        (
            "bubble-times-wave",
            product(&box_bubble(), &Lipschitz::new("wave", |q| 1.0 + (2.0 * q.y).sin(), |q| p(0.0, 2.0 * (2.0 * q.y).cos()), 4.0), 60.0),
        ),
    ];
    for name in ["vortex", "point-source-centre", "polynomial"] {
        let f = if name == "point-source-centre" { field_at("point-source", p(0.5, 0.5))? } else { field(name)? };
        for (gn, g) in &zero_data {
            let t = silhavy_trace(&f, &bx, g)?;
            out.push(
                Record::new(format!("boundary-zero-{name}-{gn}"), "N(f) = 0 when f vanishes on the boundary")
                    .sides(t.value, 0.0, TRACE_TOL)
                    .limit_status(t.status)
                    .pass(t.value.abs() <= TRACE_TOL),
            );
        }
    }
    let g = Lipschitz::new("1 + x + y^2", |q| 1.0 + q.x + q.y * q.y, |q| p(1.0, 2.0 * q.y), 2.0);
    let bump = Lipschitz::new("3 + x", |q| 3.0 + q.x, |_| p(1.0, 0.0), 0.0);
    let h = g.plus(&product(&box_bubble(), &bump, 10.0));
    for name in ["vortex", "point-source", "linear", "polynomial"] {
        let f = field(name)?;
        let a = silhavy_trace(&f, &bx, &g)?;
        let b = silhavy_trace(&f, &bx, &h)?;
        out.push(
            Record::new(format!("extension-independence-{name}"), "N(f) depends only on the boundary values of f")
                .sides(a.value, b.value, TRACE_TOL)
                .pass((a.value - b.value).abs() <= TRACE_TOL),
        );
    }
    Ok(out)
}

fn lipschitz_lemma(_: &RunConfig) -> CheckResult {
    let mut out = Vec::new();
    let sets = [
        ("circle", CompactSet::circle(Point::origin(), 1.0)),
        ("annulus", CompactSet::Region(Region::unit_disk().minus(Region::disk(Point::origin(), 0.5)))),
    ];
    for (sn, k) in &sets {
        for f in smooth_fixtures() {
            let e = lipschitz_bound(&f, k, 0.3)?;
            out.push(
                Record::new(format!("lipschitz-{sn}-{}", f.name), "sampled quotient <= 2(m + 2) sup |Df|")
                    .sides(e.quotient, e.bound, 0.0)
                    .value("cover_size", e.m)
                    .value("grad_sup", e.grad_sup)
                    .pass(e.accepted && e.quotient <= e.bound),
            );
        }
    }
    let two = CompactSet::segments(&[(p(-1.0, -2.0), p(1.0, -2.0)), (p(-1.0, 2.0), p(1.0, 2.0))]);
    let step = Lipschitz::new(
        "step",
        |q| ((q.y + 1.0) / 2.0).clamp(0.0, 1.0),
        |q| if q.y.abs() < 1.0 { p(0.0, 0.5) } else { p(0.0, 0.0) },
        0.0,
    );
    let res = lipschitz_bound(&step, &two, 0.5);
    let (status, pass) = match &res {
        Err(e @ TraceError::NotPathConnected { .. }) => (e.to_string(), true),
        Err(e) => (format!("error: {e}"), false),
        Ok(_) => ("accepted".to_string(), false),
    };
    out.push(
        Record::new("lipschitz-disconnected", "path-connectedness cannot be dropped")
            .value("expected", "not-path-connected")
            .status(status)
            .pass(pass),
    );
    Ok(out)
}

fn classifier(_: &RunConfig) -> CheckResult {
    let sched = decade_schedule();
    let cases = [
        ("vortex", field("vortex")?, Region::unit_box(), PurePart::PureGradientPartRequired),
        ("point-source", field("point-source")?, tall_box(), PurePart::RadonRepresentable),
    ];
    let mut out = Vec::new();
    for (name, f, omega, want) in cases {
        let d = pure_part_detector(&f, &omega, &sched);
        out.push(
            Record::new(format!("detector-{name}"), "layer criterion bounded iff the trace is a Radon measure")
                .value("class", d.class.as_str())
                .value("expected", want.as_str())
                .value("criterion", d.criterion.value)
                .limit_status(d.criterion.status)
                .series(Series::from_trace("criterion", &d.criterion.trace))
                .pass(d.class == want),
        );
    }
    Ok(out)
}
