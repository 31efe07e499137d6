//! Run configuration from `key=value` or JSON files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use divgreen::normal::ApproxParams;
use divgreen::ScaleSchedule;
use serde_json::Value;

/// Environment variable naming a config file; `--config` takes precedence.
pub const CONFIG_ENV: &str = "DIVGREEN_CONFIG";

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config file {0} is not valid JSON: {1}")]
    Json(PathBuf, String),
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{key}`: {msg}")]
    Value { key: String, msg: String },
}

/// Keys accepted in config files, with their documentation.
pub const KEYS: &[(&str, &str)] = &[
    ("quad.tol", "limit tolerance of the approximation schedule (> 0)"),
    ("quad.schedule.initial", "first scale delta = 1/k of the approximation schedule (> 0)"),
    ("quad.schedule.ratio", "ratio between consecutive scales, in (0, 1)"),
    ("quad.schedule.steps", "number of scales (>= 3)"),
    ("quad.schedule.cap", "magnitude treated as divergence (> 0)"),
    ("report.version", "report schema version; only 1 is supported"),
    ("output.json", "path of the JSON report (stdout when unset)"),
    ("output.csv", "path of the CSV file of k-traces"),
    ("output.plots", "directory for plot-data files of k-sweeps"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub schedule: ScaleSchedule,
    pub report_version: u32,
    pub output_json: Option<PathBuf>,
    pub output_csv: Option<PathBuf>,
    pub output_plots: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schedule: ApproxParams::default().schedule,
            report_version: REPORT_VERSION,
            output_json: None,
            output_csv: None,
            output_plots: None,
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::Value { key: key.into(), msg: format!("must be a positive number, got {v}") })
    }
}

fn number(key: &str, raw: &str) -> Result<f64, ConfigError> {
    raw.trim().parse::<f64>().map_err(|_| ConfigError::Value { key: key.into(), msg: format!("`{raw}` is not a number") })
}

impl RunConfig {
    /// Loads the file named by `explicit`, else by `DIVGREEN_CONFIG`, else the defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        let env = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        match explicit.map(Path::to_path_buf).or(env) {
            Some(p) => Self::from_file(&p),
            None => Ok(Self::default()),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        if text.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(&text).map_err(|e| ConfigError::Json(path.into(), e.to_string()))?;
            let mut flat = Vec::new();
            flatten("", &v, &mut flat);
            Self::from_pairs(flat)
        } else {
            Self::from_key_values(&text)
        }
    }

    pub fn from_key_values(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_pairs(pairs)
    }

    pub fn from_pairs(pairs: Vec<(String, String)>) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        for (k, v) in pairs {
            c.set(&k, &v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        match key {
            "quad.tol" => self.schedule.tol = positive(key, number(key, raw)?)?,
            "quad.schedule.initial" => self.schedule.initial = positive(key, number(key, raw)?)?,
            "quad.schedule.ratio" => self.schedule.ratio = number(key, raw)?,
            "quad.schedule.steps" => {
                self.schedule.steps = raw.trim().parse().map_err(|_| ConfigError::Value {
                    key: key.into(),
                    msg: format!("`{raw}` is not a non-negative integer"),
                })?
            }
            "quad.schedule.cap" => self.schedule.cap = positive(key, number(key, raw)?)?,
            "report.version" => {
                self.report_version = raw.trim().parse().map_err(|_| ConfigError::Value {
                    key: key.into(),
                    msg: format!("`{raw}` is not an integer"),
                })?
            }
            "output.json" => self.output_json = Some(PathBuf::from(raw)),
            "output.csv" => self.output_csv = Some(PathBuf::from(raw)),
            "output.plots" => self.output_plots = Some(PathBuf::from(raw)),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.schedule.validate().map_err(|e| ConfigError::Value { key: "quad.schedule".into(), msg: e.to_string() })?;
        if self.report_version != REPORT_VERSION {
            return Err(ConfigError::Value {
                key: "report.version".into(),
                msg: format!("unsupported version {}", self.report_version),
            });
        }
        Ok(())
    }

    pub fn approx_params(&self) -> ApproxParams {
        ApproxParams { schedule: self.schedule, ..ApproxParams::default() }
    }

    /// Sorted snapshot recorded in every report.
    pub fn snapshot(&self) -> BTreeMap<String, Value> {
        let s = &self.schedule;
        let mut m = BTreeMap::new();
        m.insert("quad.tol".into(), Value::from(s.tol));
        m.insert("quad.schedule.initial".into(), Value::from(s.initial));
        m.insert("quad.schedule.ratio".into(), Value::from(s.ratio));
        m.insert("quad.schedule.steps".into(), Value::from(s.steps));
        m.insert("quad.schedule.cap".into(), Value::from(s.cap));
        m.insert("report.version".into(), Value::from(self.report_version));
        for (k, p) in [("output.json", &self.output_json), ("output.csv", &self.output_csv), ("output.plots", &self.output_plots)] {
            if let Some(p) = p {
                m.insert(k.into(), Value::from(p.display().to_string()));
            }
        }
        m
    }
}

/// Nested JSON objects become dotted keys.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
