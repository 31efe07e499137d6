//! Named fields and regions, and the JSON region tree.

use divgreen::fields::{fixture, DMField, FieldKind, FixtureParams, Integrability};
use divgreen::normal::ApproxKind;
use divgreen::{Point, Region};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("unknown region `{0}`")]
    UnknownRegion(String),
    #[error("bad region tree: {0}")]
    Tree(String),
    #[error("bad point `{0}`: expected x,y")]
    Point(String),
    #[error("invalid region: {0}")]
    Invalid(String),
}

/// Region names with descriptions.
pub const REGIONS: &[(&str, &str)] = &[
    ("unit-square", "the open square (0,1)^2; aliases box, unit-box"),
    ("unit-disk", "the open disk of radius 1 about the origin; alias disk"),
    ("quarter-disk", "the part of the disk of radius 1/2 in the first quadrant"),
    ("tall-box", "the rectangle (0,1) x (-1,1)"),
    ("annulus", "the unit disk minus the closed disk of radius 1/2"),
];

/// Field aliases with their base fixture and centre.
pub const FIELD_ALIASES: &[(&str, &str, [f64; 2])] = &[("point-source-at-edge", "point-source", [0.5, 0.0])];

pub fn named_region(name: &str) -> Result<Region, FixtureError> {
    let p = Point::new;
    Ok(match name {
        "unit-square" | "box" | "unit-box" => Region::unit_box(),
        "unit-disk" | "disk" => Region::unit_disk(),
        "quarter-disk" => Region::quarter_disk(),
        "tall-box" => Region::rect(p(0.0, -1.0), p(1.0, 1.0)),
        "annulus" => Region::unit_disk().minus(Region::disk(Point::origin(), 0.5)),
        _ => return Err(FixtureError::UnknownRegion(name.to_string())),
    })
}

/// A region name, an inline JSON tree, or `@path` to a JSON file.
pub fn parse_region(spec: &str) -> Result<Region, FixtureError> {
    let s = spec.trim();
    let r = if s.starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|e| FixtureError::Tree(e.to_string()))?;
        region_from_json(&v)?
    } else if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| FixtureError::Tree(format!("{path}: {e}")))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| FixtureError::Tree(e.to_string()))?;
        region_from_json(&v)?
    } else {
        named_region(s)?
    };
    r.validate().map_err(|e| FixtureError::Invalid(e.to_string()))?;
    Ok(r)
}

fn json_point(v: &Value) -> Result<Point, FixtureError> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([x, y]) => match (x.as_f64(), y.as_f64()) {
            (Some(x), Some(y)) => Ok(Point::new(x, y)),
            _ => Err(FixtureError::Tree(format!("point {v} must hold two numbers"))),
        },
        _ => Err(FixtureError::Tree(format!("expected [x, y], got {v}"))),
    }
}

fn json_num(v: &Value) -> Result<f64, FixtureError> {
    v.as_f64().ok_or_else(|| FixtureError::Tree(format!("expected a number, got {v}")))
}

fn json_args(v: &Value, n: usize) -> Result<&[Value], FixtureError> {
    match v.as_array() {
        Some(a) if a.len() == n => Ok(a.as_slice()),
        _ => Err(FixtureError::Tree(format!("expected an array of {n} entries, got {v}"))),
    }
}

/// `{"box":[[x0,y0],[x1,y1]]}`, `{"disk":[[x,y],r]}`, `{"half-plane":[[nx,ny],offset]}`
/// (the set `n . x <= offset`), `{"sector":[[x,y],r,theta0,sweep]}` and
/// `{"op":"union"|"intersect"|"diff","a":..,"b":..}`.
pub fn region_from_json(v: &Value) -> Result<Region, FixtureError> {
    let obj = v.as_object().ok_or_else(|| FixtureError::Tree(format!("expected an object, got {v}")))?;
    if let Some(op) = obj.get("op") {
        let a = region_from_json(obj.get("a").ok_or_else(|| FixtureError::Tree("missing operand `a`".into()))?)?;
        let b = region_from_json(obj.get("b").ok_or_else(|| FixtureError::Tree("missing operand `b`".into()))?)?;
        return match op.as_str() {
            Some("union") => Ok(a.union(b)),
            Some("intersect") => Ok(a.intersect(b)),
            Some("diff") => Ok(a.minus(b)),
            _ => Err(FixtureError::Tree(format!("unknown op {op}"))),
        };
    }
    if obj.len() != 1 {
        return Err(FixtureError::Tree(format!("expected one primitive, got {v}")));
    }
    let (k, args) = obj.iter().next().expect("one entry");
    match k.as_str() {
        "box" => {
            let a = json_args(args, 2)?;
            let (lo, hi) = (json_point(&a[0])?, json_point(&a[1])?);
            if !(lo.x < hi.x && lo.y < hi.y) {
                return Err(FixtureError::Tree(format!("empty box {args}")));
            }
            Ok(Region::rect(lo, hi))
        }
        "disk" => {
            let a = json_args(args, 2)?;
            let r = json_num(&a[1])?;
            if !(r > 0.0) {
                return Err(FixtureError::Tree(format!("disk radius must be positive, got {r}")));
            }
            Ok(Region::disk(json_point(&a[0])?, r))
        }
        "half-plane" => {
            let a = json_args(args, 2)?;
            let n = json_point(&a[0])?;
            if n.norm() == 0.0 {
                return Err(FixtureError::Tree("half-plane normal must be non-zero".into()));
            }
            Ok(Region::half_plane(n, json_num(&a[1])?))
        }
        "sector" => {
            let a = json_args(args, 4)?;
            Ok(Region::sector(json_point(&a[0])?, json_num(&a[1])?, json_num(&a[2])?, json_num(&a[3])?))
        }
        "name" => named_region(args.as_str().ok_or_else(|| FixtureError::Tree(format!("bad name {args}")))?),
        _ => Err(FixtureError::Tree(format!("unknown primitive `{k}`"))),
    }
}

pub fn parse_point(s: &str) -> Result<Point, FixtureError> {
    let (x, y) = s.split_once(',').ok_or_else(|| FixtureError::Point(s.to_string()))?;
    match (x.trim().parse::<f64>(), y.trim().parse::<f64>()) {
        (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => Ok(Point::new(x, y)),
        _ => Err(FixtureError::Point(s.to_string())),
    }
}

/// Field by name or alias; explicit `center` and `vector` override the defaults.
pub fn field(name: &str, center: Option<Point>, vector: Option<Point>) -> Result<DMField, FixtureError> {
    let mut params = FixtureParams::default();
    let mut base = name;
    if let Some((_, b, c)) = FIELD_ALIASES.iter().find(|(a, _, _)| *a == name) {
        base = b;
        params.center = Point::new(c[0], c[1]);
    }
    if let Some(c) = center {
        params.center = c;
    }
    if let Some(v) = vector {
        params.vector = v;
    }
    fixture(base, params).map_err(|_| FixtureError::UnknownField(name.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldEntry {
    pub name: String,
    pub formula: String,
    pub integrability: String,
    pub parameters: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedEntry {
    pub name: String,
    pub description: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Listing {
    pub fields: Vec<FieldEntry>,
    pub regions: Vec<NamedEntry>,
    pub approximations: Vec<NamedEntry>,
    pub config_keys: Vec<NamedEntry>,
    pub suites: Vec<NamedEntry>,
}

pub fn listing() -> Listing {
    let mut fields: Vec<FieldEntry> = FieldKind::ALL
        .iter()
        .map(|k| {
            let f = fixture(k.name(), FixtureParams::default()).expect("catalogue fixture");
            FieldEntry {
                name: k.name().to_string(),
                formula: k.formula().to_string(),
                integrability: match f.class {
                    Integrability::L1 => "L1".into(),
                    Integrability::LInf => "Linf".into(),
                },
                parameters: if *k == FieldKind::Constant { "--center x,y --vector x,y" } else { "--center x,y" }.into(),
            }
        })
        .collect();
    for (alias, base, c) in FIELD_ALIASES {
        let k = FieldKind::parse(base).expect("alias of a catalogue fixture");
        fields.push(FieldEntry {
            name: alias.to_string(),
            formula: format!("{} with centre ({}, {})", k.formula(), c[0], c[1]),
            integrability: "L1".into(),
            parameters: "--center x,y".into(),
        });
    }
    let named = |n: &str, d: &str| NamedEntry { name: n.into(), description: d.into() };
    Listing {
        fields,
        regions: REGIONS.iter().map(|(n, d)| named(n, d)).collect(),
        approximations: ApproxKind::ALL
            .iter()
            .map(|k| named(k.name(), &format!("{}: {}", k.long_name(), k.describe())))
            .collect(),
        config_keys: crate::config::KEYS.iter().map(|(n, d)| named(n, d)).collect(),
        suites: vec![
            named("acceptance", "all acceptance criteria"),
            named("quick", "the criteria that finish in a few seconds"),
        ],
    }
}
