//! Scene files: `[[surface]]`, `[[curve]]` and `[[job]]` tables plus an optional
//! `[tolerances]` table, validated against a per-kind parameter schema.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use super::report::Limits;
use crate::tolerance::Tolerances;

/// A parameter value. Angles carry an explicit `deg` or `rad` suffix and are stored in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Number(f64),
    Angle(f64),
    Vector(Vec<f64>),
    Text(String),
    Bool(bool),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(x) | Value::Angle(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Parses a command-line token: `true`/`false`, an angle, a number, a comma list, or text.
    pub fn from_token(token: &str) -> Value {
        let t = token.trim();
        if t == "true" || t == "false" {
            return Value::Bool(t == "true");
        }
        if let Some(a) = parse_angle(t) {
            return Value::Angle(a);
        }
        if let Ok(x) = t.parse::<f64>() {
            return Value::Number(x);
        }
        if t.contains(',') {
            let parts: Result<Vec<f64>, _> = t.split(',').map(|p| p.trim().parse::<f64>()).collect();
            if let Ok(v) = parts {
                return Value::Vector(v);
            }
        }
        Value::Text(t.to_string())
    }

    fn to_toml(&self) -> String {
        match self {
            Value::Number(x) => float(*x),
            Value::Angle(x) => toml::Value::String(format!("{x:?}rad")).to_string(),
            Value::Vector(v) => format!("[{}]", v.iter().map(|x| float(*x)).collect::<Vec<_>>().join(", ")),
            Value::Text(s) => toml::Value::String(s.clone()).to_string(),
            Value::Bool(b) => b.to_string(),
        }
    }
}

fn float(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

/// `"60deg"` or `"1.047rad"` to radians.
pub fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Some(x) = t.strip_suffix("deg") {
        x.trim().parse::<f64>().ok().map(f64::to_radians)
    } else if let Some(x) = t.strip_suffix("rad") {
        x.trim().parse::<f64>().ok()
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub kind: String,
    pub params: BTreeMap<String, Value>,
}

impl Entity {
    pub fn num(&self, name: &str) -> f64 {
        self.params.get(name).and_then(Value::as_f64).unwrap_or(f64::NAN)
    }

    pub fn opt(&self, name: &str) -> Option<&Value> {
        self.params.get(name)
    }

    pub fn text(&self, name: &str) -> &str {
        self.params.get(name).and_then(Value::as_str).unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub verb: String,
    pub args: BTreeMap<String, Value>,
}

impl Job {
    pub fn new(verb: &str) -> Self {
        Self {
            verb: verb.to_string(),
            args: BTreeMap::new(),
        }
    }

    pub fn arg(&self, name: &str) -> Option<&Value> {
        self.args.get(name)
    }

    pub fn num(&self, name: &str) -> f64 {
        self.arg(name).and_then(Value::as_f64).unwrap_or(f64::NAN)
    }

    pub fn count(&self, name: &str) -> usize {
        self.num(name) as usize
    }

    pub fn text(&self, name: &str) -> &str {
        self.arg(name).and_then(Value::as_str).unwrap_or("")
    }

    pub fn flag(&self, name: &str) -> bool {
        matches!(self.arg(name), Some(Value::Bool(true)))
    }

    pub fn vec3(&self, name: &str) -> Option<crate::Vec3> {
        match self.arg(name) {
            Some(Value::Vector(v)) if v.len() == 3 => Some(crate::Vec3::new(v[0], v[1], v[2])),
            _ => None,
        }
    }

    pub fn grid(&self, name: &str) -> (usize, usize) {
        parse_grid(self.text(name)).unwrap_or((128, 128))
    }
}

/// `"256x128"`.
pub fn parse_grid(text: &str) -> Option<(usize, usize)> {
    let (a, b) = text.split_once('x')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// A fully resolved scene: every reference exists and every parameter is in range.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SceneConfig {
    pub tolerances: BTreeMap<String, f64>,
    pub surfaces: Vec<Entity>,
    pub curves: Vec<Entity>,
    pub jobs: Vec<Job>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 && self.column == 0 {
            write!(f, "command line")
        } else if self.line == 0 {
            write!(f, "argument {}", self.column)
        } else {
            write!(f, "{}:{}", self.line, self.column)
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("{at}: {message}")]
    Parse { at: Location, message: String },
    #[error("{at}: unknown {what} `{id}`")]
    UnknownCatalogId { at: Location, what: String, id: String },
    #[error("{at}: {entity}.{name} = {value} out of range ({expected})")]
    ParameterOutOfRange {
        at: Location,
        entity: String,
        name: String,
        value: String,
        expected: String,
    },
}

/// All problems found in a scene file, in document order.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct SceneErrors(pub Vec<SceneError>);

#[derive(Debug, Clone, Copy)]
enum Ty {
    /// Number in `(min, max)` (open) or `[min, max]` (closed) per flags.
    Num {
        min: f64,
        max: f64,
        open: bool,
    },
    Count {
        min: usize,
    },
    Angle,
    Vec3,
    Vec2,
    Grid,
    SurfaceRef,
    CurveRef,
    Choice(&'static [&'static str]),
    Bool,
}

#[derive(Debug, Clone, Copy)]
enum Def {
    Required,
    Optional,
    N(f64),
    A(f64),
    T(&'static str),
    B(bool),
}

type Schema = &'static [(&'static str, Ty, Def)];

const POS: Ty = Ty::Num {
    min: 0.0,
    max: f64::INFINITY,
    open: true,
};
const ANY: Ty = Ty::Num {
    min: f64::NEG_INFINITY,
    max: f64::INFINITY,
    open: true,
};
const SLOPE: Ty = Ty::Num {
    min: -1.0,
    max: 1.0,
    open: true,
};
const SIGN: Ty = Ty::Num {
    min: -1.0,
    max: 1.0,
    open: false,
};
const BRANCH: Ty = Ty::Choice(&["minus", "plus"]);

pub const SURFACE_KINDS: &[&str] = &[
    "sphere",
    "cylinder",
    "torus",
    "graph",
    "rectifying_developable",
    "tube",
    "canal",
];
pub const CURVE_KINDS: &[&str] = &["circle", "circular_helix", "slant_helix", "uv_line"];
pub const VERBS: &[&str] = &[
    "trace",
    "silhouette",
    "axis",
    "mu",
    "classify",
    "gauss-map",
    "canal",
    "tube",
    "radius-law",
    "verify-theorem4",
    "verify-prop2",
    "verify-prop3",
    "example1",
];

fn surface_schema(kind: &str) -> Option<Schema> {
    Some(match kind {
        "sphere" => &[("radius", POS, Def::N(1.0))],
        "cylinder" => &[
            ("radius", POS, Def::N(1.0)),
            ("z_min", ANY, Def::N(-1.0)),
            ("z_max", ANY, Def::N(1.0)),
        ],
        "torus" => &[("major", POS, Def::N(2.0)), ("minor", POS, Def::N(0.5))],
        "graph" => &[
            ("a", ANY, Def::N(1.0)),
            ("b", ANY, Def::N(-1.0)),
            ("half", POS, Def::N(1.0)),
        ],
        "rectifying_developable" => &[("curve", Ty::CurveRef, Def::Required), ("width", POS, Def::N(0.5))],
        "tube" => &[
            ("spine", Ty::CurveRef, Def::Required),
            ("radius", POS, Def::Required),
            ("branch", BRANCH, Def::T("minus")),
        ],
        "canal" => &[
            ("spine", Ty::CurveRef, Def::Required),
            ("r0", POS, Def::Required),
            (
                "law",
                Ty::Choice(&["linear", "cor3a", "cor3b", "prop1"]),
                Def::T("linear"),
            ),
            ("slope", SLOPE, Def::N(0.0)),
            ("theta", Ty::Angle, Def::Optional),
            ("v", Ty::Angle, Def::Optional),
            ("phi", Ty::Angle, Def::A(0.0)),
            ("beta", Ty::Angle, Def::Optional),
            ("sign", SIGN, Def::N(-1.0)),
            ("branch", BRANCH, Def::T("minus")),
        ],
        _ => return None,
    })
}

fn curve_schema(kind: &str) -> Option<Schema> {
    Some(match kind {
        "circle" => &[("radius", POS, Def::N(1.0))],
        "circular_helix" => &[
            ("a", POS, Def::N(2.0)),
            ("b", POS, Def::N(1.0)),
            ("turns", POS, Def::N(1.0)),
        ],
        "slant_helix" => &[("a", POS, Def::N(2.0)), ("b", POS, Def::N(1.0))],
        "uv_line" => &[
            ("surface", Ty::SurfaceRef, Def::Required),
            ("origin", Ty::Vec2, Def::Required),
            ("direction", Ty::Vec2, Def::Required),
            ("length", POS, Def::Required),
        ],
        _ => return None,
    })
}

const ON_CURVE: Schema = &[
    ("curve", Ty::CurveRef, Def::Optional),
    ("surface", Ty::SurfaceRef, Def::Optional),
    ("d", Ty::Vec3, Def::Optional),
    ("theta", Ty::Angle, Def::Optional),
    ("grid", Ty::Grid, Def::T("128x128")),
    ("samples", Ty::Count { min: 8 }, Def::N(200.0)),
];

fn job_schema(verb: &str) -> Option<Schema> {
    Some(match verb {
        "trace" => &[
            ("surface", Ty::SurfaceRef, Def::Required),
            ("d", Ty::Vec3, Def::Required),
            ("theta", Ty::Angle, Def::Required),
            ("grid", Ty::Grid, Def::T("128x128")),
            ("polish", Ty::Bool, Def::B(true)),
            ("samples", Ty::Count { min: 8 }, Def::N(200.0)),
        ],
        "silhouette" => &[
            ("surface", Ty::SurfaceRef, Def::Required),
            ("d", Ty::Vec3, Def::Required),
            ("grid", Ty::Grid, Def::T("128x128")),
            ("polish", Ty::Bool, Def::B(true)),
        ],
        "axis" | "mu" | "classify" | "gauss-map" => ON_CURVE,
        "canal" => &[
            ("surface", Ty::SurfaceRef, Def::Required),
            ("samples", Ty::Count { min: 1 }, Def::N(1000.0)),
            ("mesh", Ty::Grid, Def::T("64x32")),
        ],
        "tube" => &[
            ("spine", Ty::CurveRef, Def::Required),
            ("r", POS, Def::N(0.3)),
            ("branch", BRANCH, Def::T("minus")),
            ("samples", Ty::Count { min: 8 }, Def::N(200.0)),
            ("mesh", Ty::Grid, Def::T("64x32")),
        ],
        "radius-law" => &[
            ("law", Ty::Choice(&["cor3a", "cor3b", "prop1"]), Def::Required),
            ("theta", Ty::Angle, Def::Optional),
            ("v", Ty::Angle, Def::Optional),
            ("phi", Ty::Angle, Def::A(0.0)),
            ("beta", Ty::Angle, Def::Optional),
            ("sign", SIGN, Def::N(-1.0)),
            ("sweep", Ty::Count { min: 2 }, Def::Optional),
        ],
        "verify-theorem4" => &[
            ("spine", Ty::CurveRef, Def::T("circular_helix")),
            ("r", POS, Def::N(0.3)),
            ("branch", BRANCH, Def::T("minus")),
            ("jitter", Ty::Angle, Def::A(0.05)),
            ("samples", Ty::Count { min: 8 }, Def::N(200.0)),
        ],
        "verify-prop2" => &[
            ("spine", Ty::CurveRef, Def::T("circular_helix")),
            ("r", POS, Def::N(0.3)),
            ("branch", BRANCH, Def::T("minus")),
            ("samples", Ty::Count { min: 8 }, Def::N(200.0)),
        ],
        "verify-prop3" => &[
            ("spine", Ty::CurveRef, Def::T("slant_helix")),
            ("r", POS, Def::N(0.2)),
            ("branch", BRANCH, Def::T("minus")),
            ("samples", Ty::Count { min: 8 }, Def::N(200.0)),
        ],
        "example1" => &[
            ("a", POS, Def::N(2.0)),
            ("b", POS, Def::N(1.0)),
            ("samples", Ty::Count { min: 8 }, Def::N(200.0)),
        ],
        _ => return None,
    })
}

/// Catalog kinds that can be named directly in a job because every parameter has a default.
fn default_constructible(kind: &str, surface: bool) -> bool {
    let schema = if surface {
        surface_schema(kind)
    } else {
        curve_schema(kind)
    };
    schema.is_some_and(|s| s.iter().all(|(_, _, d)| !matches!(d, Def::Required)))
}

/// A catalog entity named by its kind, with every parameter at its default.
pub fn default_entity(kind: &str, surface: bool) -> Option<Entity> {
    if !default_constructible(kind, surface) {
        return None;
    }
    let schema = if surface {
        surface_schema(kind)
    } else {
        curve_schema(kind)
    }?;
    let mut params = BTreeMap::new();
    for (name, _, def) in schema {
        let v = match def {
            Def::N(x) => Value::Number(*x),
            Def::A(x) => Value::Angle(*x),
            Def::T(s) => Value::Text(s.to_string()),
            Def::B(b) => Value::Bool(*b),
            Def::Required | Def::Optional => continue,
        };
        params.insert(name.to_string(), v);
    }
    Some(Entity {
        id: kind.to_string(),
        kind: kind.to_string(),
        params,
    })
}

fn is_override(name: &str) -> bool {
    Tolerances::NAMES.contains(&name) || Limits::NAMES.contains(&name)
}

struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Self { starts }
    }

    fn locate(&self, text: &str, offset: usize) -> Location {
        let line = self.starts.partition_point(|&s| s <= offset).max(1);
        let start = self.starts[line - 1];
        let column = text[start..offset.min(text.len())].chars().count() + 1;
        Location { line, column }
    }
}

type RawTable = BTreeMap<String, Spanned<toml::Value>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    #[serde(default)]
    tolerances: Option<Spanned<RawTable>>,
    #[serde(default)]
    surface: Vec<Spanned<RawTable>>,
    #[serde(default)]
    curve: Vec<Spanned<RawTable>>,
    #[serde(default)]
    job: Vec<Spanned<RawTable>>,
}

struct Checker<'a> {
    text: &'a str,
    lines: LineIndex,
    errors: Vec<SceneError>,
    surface_ids: Vec<(String, String)>,
    curve_ids: Vec<(String, String)>,
}

impl<'a> Checker<'a> {
    fn at(&self, span: Range<usize>) -> Location {
        self.lines.locate(self.text, span.start)
    }

    fn parse_err(&mut self, span: Range<usize>, message: impl Into<String>) {
        let at = self.at(span);
        self.errors.push(SceneError::Parse {
            at,
            message: message.into(),
        });
    }

    fn range_err(&mut self, span: Range<usize>, entity: &str, name: &str, value: String, expected: impl Into<String>) {
        let at = self.at(span);
        self.errors.push(SceneError::ParameterOutOfRange {
            at,
            entity: entity.to_string(),
            name: name.to_string(),
            value,
            expected: expected.into(),
        });
    }

    fn convert(&mut self, raw: &Spanned<toml::Value>, entity: &str, name: &str, ty: Ty) -> Option<Value> {
        let span = raw.span();
        let v = raw.get_ref();
        let number = |v: &toml::Value| match v {
            toml::Value::Float(x) => Some(*x),
            toml::Value::Integer(i) => Some(*i as f64),
            _ => None,
        };
        let vector = |v: &toml::Value| -> Option<Vec<f64>> {
            match v {
                toml::Value::Array(a) => a.iter().map(number).collect(),
                toml::Value::String(s) => s.split(',').map(|p| p.trim().parse().ok()).collect(),
                _ => None,
            }
        };
        match ty {
            Ty::Num { min, max, open } => {
                let Some(x) = number(v) else {
                    self.parse_err(span, format!("{entity}.{name}: expected a number"));
                    return None;
                };
                let ok = if open { x > min && x < max } else { x >= min && x <= max };
                if !ok {
                    let (l, r) = if open { ('(', ')') } else { ('[', ']') };
                    self.range_err(span, entity, name, x.to_string(), format!("{l}{min}, {max}{r}"));
                    return None;
                }
                Some(Value::Number(x))
            }
            Ty::Count { min } => match number(v) {
                Some(x) if x.fract() == 0.0 && x >= min as f64 => Some(Value::Number(x)),
                Some(x) => {
                    self.range_err(span, entity, name, x.to_string(), format!("integer >= {min}"));
                    None
                }
                None => {
                    self.parse_err(span, format!("{entity}.{name}: expected an integer"));
                    None
                }
            },
            Ty::Angle => match v {
                toml::Value::String(s) => match parse_angle(s) {
                    Some(a) => Some(Value::Angle(a)),
                    None => {
                        self.parse_err(span, format!("{entity}.{name}: angle needs a `deg` or `rad` suffix"));
                        None
                    }
                },
                _ => {
                    self.parse_err(span, format!("{entity}.{name}: angle must be a string like \"60deg\""));
                    None
                }
            },
            Ty::Vec3 | Ty::Vec2 => {
                let n = if matches!(ty, Ty::Vec3) { 3 } else { 2 };
                match vector(v) {
                    Some(x) if x.len() == n && x.iter().all(|c| c.is_finite()) => {
                        if n == 3 && x.iter().map(|c| c * c).sum::<f64>() == 0.0 {
                            self.range_err(span, entity, name, format!("{x:?}"), "nonzero vector");
                            return None;
                        }
                        Some(Value::Vector(x))
                    }
                    _ => {
                        self.parse_err(span, format!("{entity}.{name}: expected {n} numbers"));
                        None
                    }
                }
            }
            Ty::Grid => {
                let g = match v {
                    toml::Value::String(s) => parse_grid(s),
                    toml::Value::Array(a) if a.len() == 2 => match (number(&a[0]), number(&a[1])) {
                        (Some(x), Some(y)) => Some((x as usize, y as usize)),
                        _ => None,
                    },
                    _ => None,
                };
                match g {
                    Some((a, b)) if a >= 4 && b >= 4 => Some(Value::Text(format!("{a}x{b}"))),
                    Some((a, b)) => {
                        self.range_err(span, entity, name, format!("{a}x{b}"), "at least 4x4");
                        None
                    }
                    None => {
                        self.parse_err(span, format!("{entity}.{name}: expected a grid like \"128x128\""));
                        None
                    }
                }
            }
            Ty::SurfaceRef | Ty::CurveRef => {
                let surface = matches!(ty, Ty::SurfaceRef);
                let Some(id) = v.as_str() else {
                    self.parse_err(span, format!("{entity}.{name}: expected an id string"));
                    return None;
                };
                let ids = if surface { &self.surface_ids } else { &self.curve_ids };
                if ids.iter().any(|(i, _)| i == id) || default_constructible(id, surface) {
                    Some(Value::Text(id.to_string()))
                } else {
                    let at = self.at(span);
                    self.errors.push(SceneError::UnknownCatalogId {
                        at,
                        what: if surface { "surface" } else { "curve" }.into(),
                        id: id.to_string(),
                    });
                    None
                }
            }
            Ty::Choice(options) => match v.as_str() {
                Some(s) if options.contains(&s) => Some(Value::Text(s.to_string())),
                Some(s) => {
                    self.range_err(
                        span,
                        entity,
                        name,
                        s.to_string(),
                        format!("one of {}", options.join(", ")),
                    );
                    None
                }
                None => {
                    self.parse_err(span, format!("{entity}.{name}: expected a string"));
                    None
                }
            },
            Ty::Bool => match v.as_bool() {
                Some(b) => Some(Value::Bool(b)),
                None => {
                    self.parse_err(span, format!("{entity}.{name}: expected true or false"));
                    None
                }
            },
        }
    }

    /// Converts `table` under `schema`, filling defaults and reporting unknown keys.
    fn params(
        &mut self,
        table: &Spanned<RawTable>,
        skip: &[&str],
        schema: Schema,
        entity: &str,
        allow_overrides: bool,
    ) -> BTreeMap<String, Value> {
        let mut out = BTreeMap::new();
        for (key, raw) in table.get_ref() {
            if skip.contains(&key.as_str()) {
                continue;
            }
            if let Some((_, ty, _)) = schema.iter().find(|(n, _, _)| n == key) {
                if let Some(v) = self.convert(raw, entity, key, *ty) {
                    out.insert(key.clone(), v);
                }
            } else if allow_overrides && is_override(key) {
                if let Some(v) = self.convert(raw, entity, key, POS) {
                    out.insert(key.clone(), v);
                }
            } else {
                self.parse_err(raw.span(), format!("{entity}: unknown parameter `{key}`"));
            }
        }
        for (name, _, def) in schema {
            if out.contains_key(*name) || table.get_ref().contains_key(*name) {
                continue;
            }
            let v = match def {
                Def::Required => {
                    self.parse_err(table.span(), format!("{entity}: missing required parameter `{name}`"));
                    continue;
                }
                Def::Optional => continue,
                Def::N(x) => Value::Number(*x),
                Def::A(x) => Value::Angle(*x),
                Def::T(s) => Value::Text(s.to_string()),
                Def::B(b) => Value::Bool(*b),
            };
            out.insert(name.to_string(), v);
        }
        out
    }

    fn string_field(&mut self, table: &Spanned<RawTable>, key: &str, entity: &str) -> Option<(String, Range<usize>)> {
        match table.get_ref().get(key) {
            Some(v) => match v.get_ref().as_str() {
                Some(s) => Some((s.to_string(), v.span())),
                None => {
                    self.parse_err(v.span(), format!("{entity}.{key}: expected a string"));
                    None
                }
            },
            None => {
                self.parse_err(table.span(), format!("{entity}: missing `{key}`"));
                None
            }
        }
    }

    fn entity(&mut self, table: &Spanned<RawTable>, surface: bool, index: usize) -> Option<Entity> {
        let label = format!("{}[{index}]", if surface { "surface" } else { "curve" });
        let id = self.string_field(table, "id", &label);
        let kind = self.string_field(table, "kind", &label)?;
        let schema = if surface {
            surface_schema(&kind.0)
        } else {
            curve_schema(&kind.0)
        };
        let Some(schema) = schema else {
            let at = self.at(kind.1);
            self.errors.push(SceneError::UnknownCatalogId {
                at,
                what: if surface { "surface kind" } else { "curve kind" }.into(),
                id: kind.0,
            });
            return None;
        };
        let (id, _) = id?;
        let params = self.params(table, &["id", "kind"], schema, &id, false);
        let e = Entity {
            id,
            kind: kind.0,
            params,
        };
        self.relations(table, &e);
        Some(e)
    }

    /// Constraints between parameters of one entity.
    fn relations(&mut self, table: &Spanned<RawTable>, e: &Entity) {
        let span_of = |k: &str| table.get_ref().get(k).map(|v| v.span()).unwrap_or(table.span());
        match e.kind.as_str() {
            "cylinder" if e.num("z_max") <= e.num("z_min") => {
                self.range_err(span_of("z_max"), &e.id, "z_max", e.num("z_max").to_string(), "> z_min");
            }
            "torus" if e.num("minor") >= e.num("major") => {
                self.range_err(span_of("minor"), &e.id, "minor", e.num("minor").to_string(), "< major");
            }
            "slant_helix" if e.num("b") >= e.num("a") => {
                self.range_err(span_of("b"), &e.id, "b", e.num("b").to_string(), "< a");
            }
            "uv_line" => {
                if let Some(Value::Vector(d)) = e.opt("direction") {
                    if d.iter().all(|x| *x == 0.0) {
                        self.range_err(span_of("direction"), &e.id, "direction", format!("{d:?}"), "nonzero");
                    }
                }
            }
            "canal" => {
                let needs: &[&str] = match e.text("law") {
                    "cor3a" | "prop1" => &["theta", "v"],
                    "cor3b" => &["beta", "v"],
                    _ => &[],
                };
                for n in needs {
                    if e.opt(n).is_none() {
                        self.parse_err(table.span(), format!("{}: law `{}` needs `{n}`", e.id, e.text("law")));
                    }
                }
            }
            _ => {}
        }
    }

    fn job(&mut self, table: &Spanned<RawTable>, index: usize) -> Option<Job> {
        let label = format!("job[{index}]");
        let (verb, span) = self.string_field(table, "verb", &label)?;
        let Some(schema) = job_schema(&verb) else {
            self.parse_err(
                span,
                format!("{label}: unknown verb `{verb}` (expected one of {})", VERBS.join(", ")),
            );
            return None;
        };
        let args = self.params(table, &["verb"], schema, &format!("{label} {verb}"), true);
        let job = Job { verb, args };
        if schema.as_ptr() == ON_CURVE.as_ptr()
            && job.arg("curve").is_none()
            && !(job.arg("surface").is_some() && job.arg("d").is_some() && job.arg("theta").is_some())
        {
            self.parse_err(
                table.span(),
                format!("{label}: give `curve`, or `surface`, `d` and `theta`"),
            );
        }
        if job.verb == "radius-law" {
            let needs: &[&str] = match job.text("law") {
                "cor3b" => &["beta", "v"],
                _ => &["theta", "v"],
            };
            for n in needs {
                if job.arg(n).is_none() && job.arg("sweep").is_none() {
                    self.parse_err(table.span(), format!("{label}: law `{}` needs `{n}`", job.text("law")));
                }
            }
        }
        Some(job)
    }
}

/// Parses and validates a scene. Every problem found is returned, each with its location.
pub fn parse_scene(text: &str) -> Result<SceneConfig, SceneErrors> {
    let lines = LineIndex::new(text);
    let raw: RawScene = match toml::from_str(text) {
        Ok(r) => r,
        Err(e) => {
            let at = lines.locate(text, e.span().map(|s| s.start).unwrap_or(0));
            return Err(SceneErrors(vec![SceneError::Parse {
                at,
                message: e.message().trim().to_string(),
            }]));
        }
    };
    let mut ck = Checker {
        text,
        lines,
        errors: Vec::new(),
        surface_ids: Vec::new(),
        curve_ids: Vec::new(),
    };
    // ids first so that references may point forwards
    for (list, surface) in [(&raw.surface, true), (&raw.curve, false)] {
        for t in list {
            let id = t
                .get_ref()
                .get("id")
                .and_then(|v| v.get_ref().as_str())
                .map(str::to_string);
            let kind = t
                .get_ref()
                .get("kind")
                .and_then(|v| v.get_ref().as_str())
                .map(str::to_string);
            if let (Some(id), Some(kind)) = (id, kind) {
                let ids = if surface {
                    &mut ck.surface_ids
                } else {
                    &mut ck.curve_ids
                };
                if ids.iter().any(|(i, _)| *i == id) {
                    let span = t.get_ref()["id"].span();
                    ck.parse_err(span, format!("duplicate id `{id}`"));
                } else {
                    ids.push((id, kind));
                }
            }
        }
    }
    let mut config = SceneConfig::default();
    if let Some(t) = &raw.tolerances {
        for (k, v) in t.get_ref() {
            if !is_override(k) {
                ck.parse_err(v.span(), format!("unknown tolerance `{k}`"));
            } else if let Some(Value::Number(x)) = ck.convert(v, "tolerances", k, POS) {
                config.tolerances.insert(k.clone(), x);
            }
        }
    }
    for (i, t) in raw.surface.iter().enumerate() {
        if let Some(e) = ck.entity(t, true, i) {
            config.surfaces.push(e);
        }
    }
    for (i, t) in raw.curve.iter().enumerate() {
        if let Some(e) = ck.entity(t, false, i) {
            config.curves.push(e);
        }
    }
    // a surface may not reference a curve that is itself defined on that surface
    let kinds: BTreeMap<String, String> = ck.curve_ids.iter().cloned().collect();
    for (e, t) in config.surfaces.iter().zip(&raw.surface) {
        for key in ["spine", "curve"] {
            if let Some(Value::Text(c)) = e.opt(key) {
                if kinds.get(c.as_str()).map(String::as_str) == Some("uv_line") {
                    let span = t.get_ref()[key].span();
                    ck.parse_err(
                        span,
                        format!("{}.{key}: `{c}` is a curve on a surface, not a space curve", e.id),
                    );
                }
            }
        }
    }
    for (i, t) in raw.job.iter().enumerate() {
        if let Some(j) = ck.job(t, i) {
            config.jobs.push(j);
        }
    }
    ck.errors.sort_by_key(|e| match e {
        SceneError::Parse { at, .. }
        | SceneError::UnknownCatalogId { at, .. }
        | SceneError::ParameterOutOfRange { at, .. } => (at.line, at.column),
    });
    if ck.errors.is_empty() {
        Ok(config)
    } else {
        Err(SceneErrors(ck.errors))
    }
}

/// Canonical text form: tolerances, surfaces, curves, jobs, keys sorted, angles in radians.
pub fn serialize_scene(config: &SceneConfig) -> String {
    let mut out = String::new();
    if !config.tolerances.is_empty() {
        out.push_str("[tolerances]\n");
        for (k, v) in &config.tolerances {
            out.push_str(&format!("{k} = {}\n", float(*v)));
        }
        out.push('\n');
    }
    let mut table = |header: &str, head: &[(&str, &str)], params: &BTreeMap<String, Value>| {
        out.push_str(&format!("[[{header}]]\n"));
        for (k, v) in head {
            out.push_str(&format!("{k} = {}\n", toml::Value::String(v.to_string())));
        }
        for (k, v) in params {
            out.push_str(&format!("{k} = {}\n", v.to_toml()));
        }
        out.push('\n');
    };
    for e in &config.surfaces {
        table("surface", &[("id", &e.id), ("kind", &e.kind)], &e.params);
    }
    for e in &config.curves {
        table("curve", &[("id", &e.id), ("kind", &e.kind)], &e.params);
    }
    for j in &config.jobs {
        table("job", &[("verb", &j.verb)], &j.args);
    }
    out
}

/// Builds a one-job scene from command-line tokens: `key=value` pairs plus an optional
/// positional catalog name that fills the verb's `surface` or `spine` argument.
/// Builds a one-job scene from command-line tokens `key=value`; a bare token fills the
/// verb's surface, spine, curve or law slot. Errors are located by argument position
/// (line 0, column = 1-based argument index, 0 for the command as a whole).
pub fn scene_from_tokens(verb: &str, tokens: &[String]) -> Result<SceneConfig, SceneErrors> {
    let header = format!("[[job]]\nverb = {}\n", toml::Value::String(verb.to_string()));
    let first_line = header.lines().count() + 1;
    let mut text = header;
    let schema = job_schema(verb).unwrap_or(&[]);
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        let (key, value) = match tok.split_once('=') {
            Some((k, v)) => (k.trim().to_string(), v.trim().to_string()),
            None => {
                let slot = ["surface", "spine", "curve", "law"]
                    .into_iter()
                    .find(|s| schema.iter().any(|(n, _, _)| n == s))
                    .unwrap_or("surface");
                (slot.to_string(), tok.clone())
            }
        };
        if let Some(prev) = seen.insert(key.clone(), i) {
            errors.push(SceneError::Parse {
                at: Location { line: 0, column: i + 1 },
                message: format!("`{tok}` sets `{key}` again (already set by `{}`)", tokens[prev]),
            });
            continue;
        }
        let v = match Value::from_token(&value) {
            Value::Angle(_) | Value::Text(_) => toml::Value::String(value).to_string(),
            other => other.to_toml(),
        };
        text.push_str(&format!("{key} = {v}\n"));
    }
    if !errors.is_empty() {
        return Err(SceneErrors(errors));
    }
    parse_scene(&text).map_err(|SceneErrors(list)| {
        SceneErrors(
            list.into_iter()
                .map(|mut e| {
                    let at = match &mut e {
                        SceneError::Parse { at, .. }
                        | SceneError::UnknownCatalogId { at, .. }
                        | SceneError::ParameterOutOfRange { at, .. } => at,
                    };
                    // line k of the generated text holds token k
                    let column = match at.line.checked_sub(first_line) {
                        Some(k) if k < tokens.len() => k + 1,
                        _ => 0,
                    };
                    *at = Location { line: 0, column };
                    e
                })
                .collect(),
        )
    })
}
