//! Single-check commands: `gauss`, `density` and `trace`.

use std::f64::consts::PI;

use divgreen::fam::{density_measure, strip_family};
use divgreen::normal::{gauss_check_bounded, make_approximation, ApproxKind};
use divgreen::quad::LimitStatus;
use divgreen::trace::{decade_schedule, pure_part_detector, shell_gradient_limit, Lipschitz, PurePart, Ramp};
use divgreen::{Point, Region, ScaleSchedule};

use crate::config::RunConfig;
use crate::fixtures::{field, parse_region, FixtureError};
use crate::report::{Record, Report, Series};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

fn compute<E: std::fmt::Display>(e: E) -> CommandError {
    CommandError::Compute(e.to_string())
}

pub struct GaussArgs<'a> {
    pub field: &'a str,
    pub center: Option<Point>,
    pub vector: Option<Point>,
    pub region: &'a str,
    pub approx: &'a str,
}

pub fn gauss(a: &GaussArgs, cfg: &RunConfig) -> Result<Report, CommandError> {
    let f = field(a.field, a.center, a.vector)?;
    let omega = parse_region(a.region)?;
    let kind = ApproxKind::parse(a.approx).map_err(|e| CommandError::Usage(e.to_string()))?;
    let na = make_approximation(&omega, kind, cfg.approx_params()).map_err(compute)?.with_label(a.region);
    let r = gauss_check_bounded(&f, &na).map_err(compute)?;
    let rec = Record::new(
        format!("gauss-{}-{}-{}", a.field, a.region, kind.name()),
        "div F(int omega) + integral chi d(div F) = lim integral F . (-D eta_k)",
    )
    .sides(r.lhs, r.rhs, r.tol)
    .value("residual", r.residual)
    .value("lhs_error", r.lhs_error)
    .value("rhs_error", r.rhs_error)
    .value("lhs_status", r.lhs_status.as_str())
    .value("rhs_status", r.rhs_status.as_str())
    .value("field", f.name())
    .value("center", vec![f.params.center.x, f.params.center.y])
    .value("approximation", kind.long_name())
    .value("validity_sup", na.validity.sup)
    .value("validity_bounded", na.validity.bounded)
    .value("notes", r.provenance.notes.clone())
    .limit_status(r.status)
    .series(Series::from_trace("rhs", &r.rhs_trace))
    .pass(r.pass);
    Ok(Report::new("gauss", cfg, vec![rec]))
}

/// `sector:theta`, `strip:j`, or a region spec; evaluated by the density at the origin.
pub fn density(set: &str, cfg: &RunConfig) -> Result<Report, CommandError> {
    let (region, oracle, label) = if let Some(t) = set.strip_prefix("sector:") {
        let theta: f64 = t.parse().map_err(|_| CommandError::Usage(format!("bad sector angle `{t}`")))?;
        if !(theta > 0.0 && theta <= 2.0 * PI) {
            return Err(CommandError::Usage(format!("sector angle must lie in (0, 2pi], got {theta}")));
        }
        (Region::sector(Point::origin(), 2.0, 0.0, theta), Some(theta / (2.0 * PI)), "mu(sector of angle theta) = theta / 2pi")
    } else if let Some(j) = set.strip_prefix("strip:") {
        let j: usize = j.parse().map_err(|_| CommandError::Usage(format!("bad strip index `{j}`")))?;
        if j == 0 {
            return Err(CommandError::Usage("strip indices start at 1".into()));
        }
        (strip_family(j).pop().expect("j >= 1 strips"), Some(0.0), "mu(A_j) = 0 for every strip")
    } else {
        (parse_region(set)?, None, "mu(A) = limit of |A n B(0,r)| / |B(0,r)|")
    };
    let m = density_measure(Point::origin(), Region::unit_disk(), ScaleSchedule::default()).map_err(compute)?;
    let r = m.eval(&region).map_err(compute)?;
    let mut rec = Record::new(format!("density-{set}"), label)
        .value("value", r.value)
        .value("error_bound", r.error_bound)
        .limit_status(r.status)
        .series(Series::from_trace("density", &r.trace));
    rec = match oracle {
        Some(o) => {
            let ok = r.converged() && (r.value - o).abs() <= 1e-3;
            rec.sides(r.value, o, 1e-3).pass(ok)
        }
        None => {
            let ok = r.converged();
            rec.pass(ok)
        }
    };
    Ok(Report::new("density", cfg, vec![rec]))
}

pub enum TraceMode {
    Detect,
    Ramp(Ramp),
}

pub fn parse_ramp(s: &str) -> Result<Ramp, CommandError> {
    match s {
        "axis" => Ok(Ramp::axis()),
        "boundary" => Ok(Ramp::Boundary),
        _ => Err(CommandError::Usage(format!("unknown ramp `{s}`; expected axis or boundary"))),
    }
}

pub fn trace(name: &str, center: Option<Point>, region: &str, mode: &TraceMode, cfg: &RunConfig) -> Result<Report, CommandError> {
    let f = field(name, center, None)?;
    let omega = parse_region(region)?;
    let sched = decade_schedule();
    let rec = match mode {
        TraceMode::Detect => {
            let d = pure_part_detector(&f, &omega, &sched);
            Record::new(
                format!("detect-{name}-{region}"),
                "the normal trace is a Radon measure iff (1/delta) integral over the inner layer of |F . n| stays bounded",
            )
            .value("class", d.class.as_str())
            .value("criterion", d.criterion.value)
            .value("note", d.note.clone().unwrap_or_default())
            .limit_status(d.criterion.status)
            .series(Series::from_trace("criterion", &d.criterion.trace))
            .pass(d.class != PurePart::Inconclusive)
        }
        TraceMode::Ramp(ramp) => {
            let r = shell_gradient_limit(&f, &omega, &Lipschitz::constant(1.0), ramp, &sched).map_err(compute)?;
            let which = if matches!(ramp, Ramp::Boundary) { "boundary" } else { "axis" };
            Record::new(format!("ramp-{name}-{region}-{which}"), "S_k = integral F . D g_k along k = 10, 100, ...")
                .value("value", r.value)
                .value("error_bound", r.error_bound)
                .value("ramp", which)
                .limit_status(r.status)
                .series(Series::from_trace("S_k", &r.trace))
                .pass(matches!(r.status, LimitStatus::Converged | LimitStatus::Diverging))
        }
    };
    Ok(Report::new("trace", cfg, vec![rec]))
}
