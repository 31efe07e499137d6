use std::path::Path;
use std::process::{Command, Output};

use divgreen::{Point, Region};
use divgreen_cli::config::{ConfigError, RunConfig};
use divgreen_cli::fixtures::{field, parse_point, parse_region, FixtureError};
use divgreen_cli::report::{num, Record, Report, Series};
use serde_json::Value;

fn bin(args: &[&str], config_env: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_divgreen"));
    c.args(args).env_remove("DIVGREEN_CONFIG");
    if let Some(p) = config_env {
        c.env("DIVGREEN_CONFIG", p);
    }
    c.output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn config_key_values_and_json() {
    let c = RunConfig::from_key_values("# comment\nquad.tol = 1e-5\nquad.schedule.steps=10\n\nquad.schedule.ratio=0.25\n").unwrap();
    assert_eq!(c.schedule.tol, 1e-5);
    assert_eq!(c.schedule.steps, 10);
    assert_eq!(c.schedule.ratio, 0.25);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"{"quad": {"tol": 2e-6, "schedule": {"steps": 12}}, "output.csv": "k.csv"}"#).unwrap();
    let c = RunConfig::from_file(&p).unwrap();
    assert_eq!(c.schedule.tol, 2e-6);
    assert_eq!(c.schedule.steps, 12);
    assert_eq!(c.output_csv.as_deref(), Some(Path::new("k.csv")));
    assert_eq!(c.snapshot()["quad.schedule.steps"], Value::from(12));
}

#[test]
fn config_rejects_bad_input() {
    assert!(matches!(RunConfig::from_key_values("quad.tolerance=1"), Err(ConfigError::UnknownKey(_))));
    assert!(matches!(RunConfig::from_key_values("quad.tol=0"), Err(ConfigError::Value { .. })));
    assert!(matches!(RunConfig::from_key_values("quad.tol=-1e-3"), Err(ConfigError::Value { .. })));
    assert!(matches!(RunConfig::from_key_values("quad.schedule.ratio=1.5"), Err(ConfigError::Value { .. })));
    assert!(matches!(RunConfig::from_key_values("quad.schedule.steps=2"), Err(ConfigError::Value { .. })));
    assert!(matches!(RunConfig::from_key_values("report.version=2"), Err(ConfigError::Value { .. })));
    assert!(matches!(RunConfig::from_key_values("quad.tol"), Err(ConfigError::Syntax { line: 1 })));
    assert!(matches!(RunConfig::from_key_values("quad.tol=abc"), Err(ConfigError::Value { .. })));
}

#[test]
fn region_trees() {
    let r = parse_region(r#"{"op":"diff","a":{"box":[[0,0],[1,1]]},"b":{"disk":[[0,0],0.5]}}"#).unwrap();
    assert!(r.contains(Point::new(0.9, 0.9)));
    assert!(!r.contains(Point::new(0.1, 0.1)));
    let h = parse_region(r#"{"op":"intersect","a":{"disk":[[0,0],1]},"b":{"half-plane":[[0,-1],0]}}"#).unwrap();
    assert!(h.contains(Point::new(0.0, 0.5)) && !h.contains(Point::new(0.0, -0.5)));
    assert!(parse_region(r#"{"sector":[[0,0],1,0,1.0]}"#).is_ok());
    assert!(matches!(parse_region("unit-square").unwrap(), Region::Rect { .. }));
    assert!(matches!(parse_region("nowhere"), Err(FixtureError::UnknownRegion(_))));
    assert!(matches!(parse_region(r#"{"disk":[[0,0],-1]}"#), Err(FixtureError::Tree(_))));
    assert!(matches!(parse_region(r#"{"op":"xor","a":{"disk":[[0,0],1]},"b":{"disk":[[0,0],1]}}"#), Err(FixtureError::Tree(_))));
    assert!(matches!(parse_region(r#"{"box":[[0,0]]}"#), Err(FixtureError::Tree(_))));

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    std::fs::write(&p, r#"{"box":[[0,0],[2,1]]}"#).unwrap();
    assert!(parse_region(&format!("@{}", p.display())).unwrap().contains(Point::new(1.5, 0.5)));
}

#[test]
fn fields_and_points() {
    let f = field("point-source-at-edge", None, None).unwrap();
    assert_eq!(f.params.center, Point::new(0.5, 0.0));
    let f = field("vortex", Some(Point::new(1.0, 2.0)), None).unwrap();
    assert_eq!(f.params.center, Point::new(1.0, 2.0));
    assert!(field("nope", None, None).is_err());
    assert_eq!(parse_point("-1.5, 2").unwrap(), Point::new(-1.5, 2.0));
    assert!(parse_point("1;2").is_err());
    assert!(parse_point("1,nan").is_err());
}

#[test]
fn reports_are_consistent() {
    let cfg = RunConfig::default();
    let recs = vec![
        Record::new("a", "x = x").sides(1.0, 1.0, 1e-3).pass(true),
        Record::new("b", "y = y")
            .value("v", f64::NAN)
            .series(Series::from_trace("S", &[(0.1, 0.5), (0.01, 0.25)]))
            .pass(false),
    ];
    let r = Report::new("test", &cfg, recs);
    assert_eq!((r.summary.total, r.summary.passed, r.summary.failed), (2, 1, 1));
    assert!(!r.pass());
    let v: Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["records"][1]["values"]["v"], Value::Null);
    assert_eq!(v["records"][0]["anchor"], "x = x");
    assert_eq!(r.to_csv(), "record,x_label,y_label,x,y\nb,k,S,10.0,0.5\nb,k,S,100.0,0.25\n");
    let plots = r.plot_files();
    assert_eq!(plots.len(), 1);
    assert_eq!(plots[0].0, "b.dat");
    assert_eq!(num(1e-7), "1e-7");
    assert_eq!(num(0.5), "0.5");
}

#[test]
fn fixtures_command() {
    let o = bin(&["fixtures"], None);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    for name in ["vortex", "point-source", "diag-tangential"] {
        assert!(s.contains(name), "{name}");
    }
    let o = bin(&["fixtures", "--json"], None);
    let v = json(&o);
    assert!(v["fields"].as_array().unwrap().iter().any(|f| f["name"] == "diag-tangential"));
    assert!(v["config_keys"].as_array().unwrap().iter().any(|f| f["name"] == "quad.schedule.ratio"));
    assert_eq!(bin(&["fixtures", "--bogus"], None).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn gauss_command() {
    let o = bin(&["gauss", "--field", "linear", "--region", "disk", "--approx", "ramp"], None);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["records"][0];
    assert!(r["values"]["residual"].as_f64().unwrap() <= 1e-3);
    assert!((r["lhs"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-9);
    assert!(r["anchor"].as_str().unwrap().contains("div F"));

    let o = bin(&["gauss", "--field", "point-source-at-edge", "--region", "box", "--approx", "canonical"], None);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["records"][0];
    assert!((r["lhs"].as_f64().unwrap() - 0.5).abs() < 1e-3 && (r["rhs"].as_f64().unwrap() - 0.5).abs() < 1e-3);

    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = (dir.path().join("r.json"), dir.path().join("k.csv"));
    let o = bin(
        &["gauss", "--field", "constant", "--region", "box", "--approx", "outer", "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r["records"][0]["lhs"].as_f64().unwrap().abs() < 1e-9);
    assert!(r["records"][0]["rhs"].as_f64().unwrap().abs() < 1e-3);
    let c = std::fs::read_to_string(&csv).unwrap();
    assert!(c.starts_with("record,x_label,y_label,x,y\n") && c.lines().count() > 2);
    assert!(c.lines().skip(1).all(|l| l.split(',').count() == 5));

    assert_eq!(bin(&["gauss", "--field", "nope", "--region", "box", "--approx", "outer"], None).status.code(), Some(2));
    assert_eq!(bin(&["gauss", "--field", "linear", "--region", "box", "--approx", "spline"], None).status.code(), Some(2));
    assert_eq!(bin(&["gauss", "--field", "linear", "--region", "box"], None).status.code(), Some(2));
}

#[test]
fn density_and_trace_commands() {
    let o = bin(&["density", "--set", "sector:1.5708"], None);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["records"][0];
    assert!((r["values"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-3);
    let o = bin(&["density", "--set", "strip:3"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["records"][0]["values"]["value"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(bin(&["density", "--set", "sector:abc"], None).status.code(), Some(2));

    let o = bin(&["trace", "--field", "vortex", "--region", "unit-square", "--detect"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["records"][0]["values"]["class"], "pure-gradient-part-required");
    let o = bin(&["trace", "--field", "point-source", "--region", "tall-box", "--ramp", "axis"], None);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["records"][0];
    assert!((r["values"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    assert!(r["series"]["points"].as_array().unwrap().len() >= 3);
    assert_eq!(bin(&["trace", "--field", "vortex", "--region", "box", "--detect", "--ramp", "axis"], None).status.code(), Some(2));
}

#[test]
fn config_files_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "quad.tolerance = 1e-6\n").unwrap();
    let good = dir.path().join("good.conf");
    std::fs::write(&good, "quad.schedule.steps = 12\n").unwrap();
    let args = ["density", "--set", "sector:3.14159"];

    let o = bin(&["--config", bad.to_str().unwrap(), "density", "--set", "sector:1"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("quad.tolerance"));
    assert_eq!(bin(&args, Some(&bad)).status.code(), Some(2));

    let o = bin(&args, Some(&good));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["config"]["quad.schedule.steps"], 12);
    // The flag wins over the environment.
    let o = bin(&["--config", good.to_str().unwrap(), "density", "--set", "sector:3.14159"], Some(&bad));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn quick_suite_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let a = bin(&["suite", "quick", "--plots", plots.to_str().unwrap()], None);
    let b = bin(&["suite", "quick"], None);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["command"], "suite quick");
    let recs = v["records"].as_array().unwrap();
    assert!(recs.iter().all(|r| r["anchor"].as_str().map_or(false, |s| !s.is_empty())));
    assert_eq!(v["summary"]["passed"].as_u64().unwrap() as usize, recs.iter().filter(|r| r["pass"] == true).count());
    let files: Vec<_> = std::fs::read_dir(&plots).unwrap().collect();
    assert!(!files.is_empty());
    assert_eq!(bin(&["suite", "everything"], None).status.code(), Some(2));
}
