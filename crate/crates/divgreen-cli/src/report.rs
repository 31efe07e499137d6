//! Versioned JSON reports, CSV traces and plot-data files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use divgreen::quad::LimitStatus;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

/// A k-sweep: `(x, y)` columns with their labels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub x: String,
    pub y: String,
    pub points: Vec<[f64; 2]>,
}

impl Series {
    /// `(scale, value)` pairs of a limit trace, plotted against `k = 1/scale`.
    pub fn from_trace(y: &str, trace: &[(f64, f64)]) -> Self {
        Series { x: "k".into(), y: y.into(), points: trace.iter().map(|(d, v)| [1.0 / d, *v]).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    /// The identity or bound the record checks.
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub values: BTreeMap<String, Value>,
    pub status: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
}

impl Record {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>) -> Self {
        Record {
            name: name.into(),
            anchor: anchor.into(),
            criterion: None,
            lhs: None,
            rhs: None,
            tol: None,
            values: BTreeMap::new(),
            status: "ok".into(),
            pass: false,
            series: None,
        }
    }

    pub fn sides(mut self, lhs: f64, rhs: f64, tol: f64) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self.tol = Some(tol);
        self
    }

    pub fn value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.insert(key.to_string(), v.into());
        self
    }

    pub fn status(mut self, s: impl Into<String>) -> Self {
        self.status = s.into();
        self
    }

    pub fn limit_status(self, s: LimitStatus) -> Self {
        self.status(s.as_str())
    }

    pub fn series(mut self, s: Series) -> Self {
        self.series = Some(s);
        self
    }

    pub fn pass(mut self, ok: bool) -> Self {
        self.pass = ok;
        self
    }

    /// A failed record for a computation that returned an error.
    pub fn error(name: impl Into<String>, anchor: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Record::new(name, anchor).status(format!("error: {err}")).pass(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionSummary {
    pub id: u32,
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub command: String,
    pub config: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<CriterionSummary>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: impl Into<String>, cfg: &RunConfig, records: Vec<Record>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        Report {
            version: cfg.report_version,
            command: command.into(),
            config: cfg.snapshot(),
            criteria: vec![],
            summary: Summary { total: records.len(), passed, failed: records.len() - passed },
            records,
        }
    }

    pub fn pass(&self) -> bool {
        self.summary.failed == 0 && self.criteria.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// `record,x_label,y_label,x,y` rows for every series.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("record,x_label,y_label,x,y\n");
        for r in &self.records {
            if let Some(se) = &r.series {
                for [x, y] in &se.points {
                    let _ = writeln!(s, "{},{},{},{},{}", r.name, se.x, se.y, num(*x), num(*y));
                }
            }
        }
        s
    }

    /// One whitespace-separated two-column file per series, keyed by a file name.
    pub fn plot_files(&self) -> Vec<(String, String)> {
        self.records
            .iter()
            .filter_map(|r| {
                let se = r.series.as_ref()?;
                let mut s = format!("# {} {}\n", se.x, se.y);
                for [x, y] in &se.points {
                    let _ = writeln!(s, "{} {}", num(*x), num(*y));
                }
                let file: String =
                    r.name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
                Some((format!("{file}.dat"), s))
            })
            .collect()
    }
}

/// Shortest round-trip decimal form; Rust formatting ignores the locale.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        format!("{v}")
    }
}
