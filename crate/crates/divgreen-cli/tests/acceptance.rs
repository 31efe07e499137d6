//! Acceptance suite: one pass/fail line per criterion.
//!
//! Criteria 1-11 run in-process and their records are re-checked here against pinned
//! tolerances; criterion 12 runs the binary twice and compares the reports byte for byte.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use divgreen_cli::config::RunConfig;
use divgreen_cli::report::Record;
use divgreen_cli::suite::CRITERIA;
use serde_json::Value;

const SUITE_BUDGET: Duration = Duration::from_secs(300);

fn num(r: &Record, key: &str) -> f64 {
    r.values.get(key).and_then(Value::as_f64).unwrap_or(f64::NAN)
}

fn text<'a>(r: &'a Record, key: &str) -> &'a str {
    r.values.get(key).and_then(Value::as_str).unwrap_or("")
}

fn named<'a>(rs: &'a [Record], prefix: &str) -> Vec<&'a Record> {
    rs.iter().filter(|r| r.name.starts_with(prefix)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sides(r: &Record) -> (f64, f64) {
    (r.lhs.unwrap_or(f64::NAN), r.rhs.unwrap_or(f64::NAN))
}

/// Independent re-check of the numbers each criterion reports.
fn recheck(id: u32, rs: &[Record]) -> Result<(), String> {
    match id {
        1 => {
            let sums = named(rs, "vortex-strip-sum-k");
            ensure(sums.len() == 3, || format!("{} strip sums", sums.len()))?;
            let mut last = f64::NEG_INFINITY;
            for r in sums {
                let (s, oracle) = sides(r);
                let k = num(r, "k");
                ensure(((s - oracle) / oracle).abs() <= 1e-6, || format!("k={k}: {s} vs {oracle}"))?;
                ensure(s >= 0.5 * (k * k + 1.0).ln() && s > last, || format!("k={k}: {s} below bound or not increasing"))?;
                last = s;
            }
            let lim = named(rs, "vortex-strip-sum-limit");
            ensure(lim.len() == 1 && lim[0].status == "diverging", || "divergence not raised".into())
        }
        2 => {
            let sums = named(rs, "point-source-strip-sum-k");
            ensure(sums.len() == 3, || format!("{} strip sums", sums.len()))?;
            for r in sums {
                let (s, _) = sides(r);
                let k = num(r, "k");
                ensure((s - 0.5).abs() <= 1.0 / (2.0 * PI * k) + 1e-4, || format!("k={k}: S_k = {s}"))?;
            }
            Ok(())
        }
        3 => {
            let sectors = named(rs, "sector-");
            ensure(sectors.len() == 3, || format!("{} sectors", sectors.len()))?;
            for r in sectors {
                let (v, o) = sides(r);
                ensure((v - o).abs() <= 1e-3, || format!("{}: {v} vs {o}", r.name))?;
            }
            let s = named(rs, "strip-family");
            ensure(s.len() == 1, || "missing strip family".into())?;
            let s = s[0];
            ensure(num(s, "max_part") <= 1e-6, || format!("strip mass {}", num(s, "max_part")))?;
            ensure((sides(s).0 - 0.5).abs() <= 1e-3, || format!("union {}", sides(s).0))?;
            ensure(s.values.get("sigma_additivity_violated") == Some(&Value::Bool(true)), || "flag not set".into())
        }
        4 => {
            let pairs = named(rs, "routes-");
            ensure(pairs.len() == 12, || format!("{} pairs", pairs.len()))?;
            for r in pairs {
                let a: Vec<f64> = serde_json::from_value(r.values["shell"].clone()).map_err(|e| e.to_string())?;
                let b: Vec<f64> = serde_json::from_value(r.values["boundary"].clone()).map_err(|e| e.to_string())?;
                ensure((a[0] - b[0]).abs() <= 1e-3 && (a[1] - b[1]).abs() <= 1e-3, || format!("{}: {a:?} vs {b:?}", r.name))?;
            }
            Ok(())
        }
        5 => {
            let all = named(rs, "gauss-");
            ensure(all.len() == 17, || format!("{} Gauss records", all.len()))?;
            for r in &all {
                let (l, h) = sides(r);
                ensure((l - h).abs() <= 1e-3 && r.status == "converged", || format!("{}: {l} vs {h}", r.name))?;
            }
            let hw = named(rs, "gauss-half-weight-atom");
            let (l, h) = sides(hw[0]);
            ensure((l - 0.5).abs() <= 1e-3 && (h - 0.5).abs() <= 1e-3, || format!("half weight {l} {h}"))
        }
        6 => {
            let tv = named(rs, "tv-");
            ensure(tv.len() == 3, || format!("{} sets", tv.len()))?;
            for r in tv {
                let (v, per) = sides(r);
                ensure(v >= per - 1e-2, || format!("{}: {v} < {per}", r.name))?;
            }
            Ok(())
        }
        7 => {
            let tan = named(rs, "tangential-M");
            ensure(tan.len() == 2, || format!("{} thresholds", tan.len()))?;
            for r in tan {
                ensure(sides(r).0 >= 0.5 - 1e-3, || format!("{}: {}", r.name, sides(r).0))?;
            }
            let inc = named(rs, "atomic-increment-M");
            ensure(!inc.is_empty(), || "no atomic increments".into())?;
            let oracle = 10f64.ln() / (2.0 * PI);
            for r in inc {
                ensure((sides(r).0 - oracle).abs() <= 0.05 * oracle, || format!("{}: {}", r.name, sides(r).0))?;
            }
            Ok(())
        }
        8 => {
            let a = named(rs, "aura-balls");
            ensure(a.len() == 1, || "missing certificate".into())?;
            let v = |k: &str| -> Vec<f64> { serde_json::from_value(a[0].values[k].clone()).unwrap_or_default() };
            let lambda = v("lambda");
            ensure(lambda.windows(2).all(|w| w[1] <= w[0]) && lambda.last().map_or(false, |l| *l <= 1e-3), || {
                format!("lambda {lambda:?}")
            })?;
            ensure(v("complement_mass").iter().all(|c| c.abs() <= 1e-6), || "complement mass".into())?;
            ensure(v("mass").iter().all(|m| (m - 1.0).abs() <= 1e-3), || "mass".into())?;
            ensure(text(a[0], "verdict") == "pure-supported", || "not certified".into())?;
            let core = named(rs, "core-depth-6");
            let cells: Vec<Vec<f64>> = serde_json::from_value(core[0].values["bounds"].clone()).map_err(|e| e.to_string())?;
            ensure(!cells.is_empty() && cells.iter().all(|c| c[0] <= 0.0 && c[1] <= 0.0 && c[2] >= 0.0 && c[3] >= 0.0), || {
                format!("cells {cells:?}")
            })
        }
        9 => {
            let b = named(rs, "trace-bound-");
            ensure(b.len() == 30, || format!("{} bound records", b.len()))?;
            for r in b {
                let (v, bound) = sides(r);
                ensure(v <= bound + 1e-3, || format!("{}: {v} > {bound}", r.name))?;
            }
            for r in named(rs, "boundary-zero-") {
                ensure(sides(r).0.abs() <= 1e-3, || format!("{}: {}", r.name, sides(r).0))?;
            }
            let ext = named(rs, "extension-independence-");
            ensure(ext.len() == 4, || format!("{} extension records", ext.len()))?;
            for r in ext {
                let (a, b) = sides(r);
                ensure((a - b).abs() <= 1e-3, || format!("{}: {a} vs {b}", r.name))?;
            }
            Ok(())
        }
        10 => {
            let l = named(rs, "lipschitz-");
            let runs: Vec<_> = l.iter().filter(|r| r.name != "lipschitz-disconnected").collect();
            ensure(runs.len() == 10, || format!("{} fixtures", runs.len()))?;
            for r in runs {
                let m = num(r, "cover_size");
                let (q, _) = sides(r);
                ensure(q <= 2.0 * (m + 2.0) * num(r, "grad_sup"), || format!("{}: quotient {q}", r.name))?;
            }
            let d = named(rs, "lipschitz-disconnected");
            ensure(d.len() == 1 && d[0].status.starts_with("path-connected set required"), || "counterexample accepted".into())
        }
        11 => {
            let v = named(rs, "detector-vortex");
            let p = named(rs, "detector-point-source");
            ensure(v.len() == 1 && text(v[0], "class") == "pure-gradient-part-required", || "vortex class".into())?;
            ensure(p.len() == 1 && text(p[0], "class") == "radon-representable", || "point-source class".into())
        }
        _ => Err(format!("no re-check for criterion {id}")),
    }
}

fn run_binary() -> Result<(Vec<u8>, Duration), String> {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_divgreen"))
        .args(["suite", "acceptance"])
        .env_remove("DIVGREEN_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    if !out.status.success() {
        return Err(format!("exit status {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok((out.stdout, elapsed))
}

fn main() {
    let cfg = RunConfig::default();
    let mut failed = 0;
    for c in CRITERIA {
        let o = c.run(&cfg);
        let mut problems = Vec::new();
        if let Some(r) = o.records.iter().find(|r| !r.pass) {
            problems.push(format!("record {} failed ({})", r.name, r.status));
        }
        if let Err(e) = recheck(c.id, &o.records) {
            problems.push(e);
        }
        if o.elapsed > c.budget {
            problems.push(format!("over budget {:.0}s", c.budget.as_secs_f64()));
        }
        let ok = o.pass && problems.is_empty();
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {:<24} {}  {:>7.2}s / {:>3.0}s  {}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            o.elapsed.as_secs_f64(),
            c.budget.as_secs_f64(),
            problems.join("; ")
        );
    }

    let det = run_binary().and_then(|(a, ta)| {
        let (b, tb) = run_binary()?;
        let slow = ta.max(tb);
        if a != b {
            Err("reports differ between runs".into())
        } else if slow > SUITE_BUDGET {
            Err(format!("suite took {:.1}s", slow.as_secs_f64()))
        } else {
            Ok((a.len(), slow))
        }
    });
    let ok = det.is_ok();
    failed += usize::from(!ok);
    match det {
        Ok((bytes, t)) => println!(
            "criterion 12 {:<24} PASS  {:>7.2}s / {:>3.0}s  {bytes} identical bytes",
            "determinism",
            t.as_secs_f64(),
            SUITE_BUDGET.as_secs_f64()
        ),
        Err(e) => println!("criterion 12 {:<24} FAIL  {e}", "determinism"),
    }

    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
