//! JSON problem files and report helpers.
//!
//! A problem file is an object with a `kind`, the kind's payload, an optional `query` and an
//! optional `sampling` block. Every object rejects unknown fields, and errors carry the path
//! of the offending field.
//!
//! ```json
//! {"kind": "lcp", "M": [[-1, 0], [1, 1]],
//!  "query": {"x": [0, 0], "u": [0, 0], "X": "domain"},
//!  "sampling": {"seed": 7}}
//! ```

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::functions::{PlCell, PlFunction};
use crate::geometry::HPolyhedron;
use crate::oracle::{FunctionWitness, SampleConfig, Witness};
use crate::stratified::{build_lcp, build_linear_system, stratify_union, StratifiedMapping, UNION_BUDGET};

/// `{x : A x ≤ b, C x = d}`; `dim` is needed only when there are no rows.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(rename = "C", default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<f64>,
}

impl PolySpec {
    pub fn build(&self, path: &str) -> Result<HPolyhedron<f64>> {
        let dim = match (self.dim, self.a.first().or(self.c.first())) {
            (Some(n), _) => n,
            (None, Some(row)) => row.len(),
            (None, None) => return Err(Error::Schema(format!("{path}: `dim` is required when there are no rows"))),
        };
        if self.a.len() != self.b.len() {
            return Err(Error::Schema(format!("{path}: `A` has {} rows but `b` has {} entries", self.a.len(), self.b.len())));
        }
        if self.c.len() != self.d.len() {
            return Err(Error::Schema(format!("{path}: `C` has {} rows but `d` has {} entries", self.c.len(), self.d.len())));
        }
        HPolyhedron::new(dim, self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()).map_err(|e| e.context(path))
    }

    pub fn of(p: &HPolyhedron<f64>) -> PolySpec {
        PolySpec { dim: Some(p.dim()), a: p.a().to_vec(), b: p.b().to_vec(), c: p.c().to_vec(), d: p.d().to_vec() }
    }
}

/// The set `X` of a query.
#[derive(Clone, Debug, PartialEq)]
pub enum SetSpec {
    /// The whole space.
    Full,
    /// `dom S` for mappings that know their domain, `dom σ_D` for sublinear functions.
    Domain,
    Poly(PolySpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    #[serde(rename = "C")]
    pub set: PolySpec,
    pub g: Vec<f64>,
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlackBox {
    Disk,
    Hyperbola,
}

/// Supplementary analyses that may accompany a criterion run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Necessity,
    Sufficiency,
    Directional,
    Oracle,
}

#[derive(Clone, Debug, Default)]
pub struct Query {
    pub x: Option<Vec<f64>>,
    pub u: Option<Vec<f64>>,
    pub x_set: Option<SetSpec>,
    pub v: Option<Vec<f64>>,
    pub kappa: Option<f64>,
    pub analyses: Vec<Analysis>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    x: Option<Vec<f64>>,
    u: Option<Vec<f64>>,
    #[serde(rename = "X")]
    x_set: Option<Value>,
    v: Option<Vec<f64>>,
    kappa: Option<f64>,
    #[serde(default)]
    analyses: Vec<Analysis>,
}

#[derive(Clone, Debug)]
pub enum Problem {
    Lcp { m: Vec<Vec<f64>> },
    LinSys { a: Vec<Vec<f64>>, k: PolySpec },
    Union { n: usize, pieces: Vec<PolySpec> },
    PlFunction { n: Option<usize>, cells: Vec<CellSpec> },
    Sublinear { d: PolySpec },
    BlackBox(BlackBox),
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub problem: Problem,
    pub query: Query,
    pub sampling: SampleConfig,
}

fn field<D: DeserializeOwned>(v: Value, path: &str) -> Result<D> {
    serde_json::from_value(v).map_err(|e| Error::Schema(format!("{path}: {e}")))
}

fn take(obj: &mut Map<String, Value>, key: &str, path: &str) -> Result<Value> {
    obj.remove(key).ok_or_else(|| Error::Schema(format!("{path}: missing field `{key}`")))
}

fn no_leftovers(obj: &Map<String, Value>, kind: &str) -> Result<()> {
    match obj.keys().next() {
        Some(k) => Err(Error::Schema(format!("unknown field `{k}` for kind `{kind}`"))),
        None => Ok(()),
    }
}

fn set_spec(v: Value, path: &str) -> Result<SetSpec> {
    match v {
        Value::String(s) => match s.as_str() {
            "full" => Ok(SetSpec::Full),
            "domain" => Ok(SetSpec::Domain),
            other => Err(Error::Schema(format!("{path}: unknown set `{other}`, expected \"full\", \"domain\" or an object"))),
        },
        v @ Value::Object(_) => Ok(SetSpec::Poly(field(v, path)?)),
        _ => Err(Error::Schema(format!("{path}: expected a string or an object"))),
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Schema(format!("invalid JSON: {e}")))?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<ProblemFile> {
        let Value::Object(mut obj) = v else {
            return Err(Error::Schema("problem file must be a JSON object".into()));
        };
        let kind: String = field(take(&mut obj, "kind", "problem")?, "kind")?;
        let sampling: SampleConfig = match obj.remove("sampling") {
            Some(s) => field(s, "sampling")?,
            None => SampleConfig::default(),
        };
        sampling.validate()?;
        let mut query = match obj.remove("query") {
            Some(q) => {
                let raw: RawQuery = field(q, "query")?;
                Query {
                    x: raw.x,
                    u: raw.u,
                    x_set: raw.x_set.map(|x| set_spec(x, "query.X")).transpose()?,
                    v: raw.v,
                    kappa: raw.kappa,
                    analyses: raw.analyses,
                }
            }
            None => Query::default(),
        };
        if let Some(k) = query.kappa {
            if !(k >= 0.0) {
                return Err(Error::Schema("query.kappa must be nonnegative".into()));
            }
        }
        let problem = match kind.as_str() {
            "lcp" => Problem::Lcp { m: field(take(&mut obj, "M", "lcp")?, "M")? },
            "linsys" => {
                Problem::LinSys { a: field(take(&mut obj, "A", "linsys")?, "A")?, k: field(take(&mut obj, "K", "linsys")?, "K")? }
            }
            "union" => {
                Problem::Union { n: field(take(&mut obj, "n", "union")?, "n")?, pieces: field(take(&mut obj, "pieces", "union")?, "pieces")? }
            }
            "pl_function" => {
                let cells = field(take(&mut obj, "cells", "pl_function")?, "cells")?;
                let n = obj.remove("n").map(|n| field(n, "n")).transpose()?;
                // the point, slope and set may also sit at the top level
                for (key, slot) in [("x", &mut query.x), ("v", &mut query.v)] {
                    if let Some(val) = obj.remove(key) {
                        if slot.is_some() {
                            return Err(Error::Schema(format!("`{key}` given both at the top level and in query")));
                        }
                        *slot = Some(field(val, key)?);
                    }
                }
                if let Some(val) = obj.remove("X") {
                    if query.x_set.is_some() {
                        return Err(Error::Schema("`X` given both at the top level and in query".into()));
                    }
                    query.x_set = Some(set_spec(val, "X")?);
                }
                Problem::PlFunction { n, cells }
            }
            "sublinear" => Problem::Sublinear { d: field(take(&mut obj, "D", "sublinear")?, "D")? },
            "blackbox" => {
                let name: String = field(take(&mut obj, "function", "blackbox")?, "function")?;
                Problem::BlackBox(match name.as_str() {
                    "disk" => BlackBox::Disk,
                    "hyperbola" => BlackBox::Hyperbola,
                    other => return Err(Error::Schema(format!("function: unknown black box `{other}`, expected \"disk\" or \"hyperbola\""))),
                })
            }
            other => {
                return Err(Error::Schema(format!(
                    "kind: unknown kind `{other}`, expected one of lcp, linsys, union, pl_function, sublinear, blackbox"
                )))
            }
        };
        no_leftovers(&obj, &kind)?;
        Ok(ProblemFile { problem, query, sampling })
    }

    pub fn kind(&self) -> &'static str {
        match self.problem {
            Problem::Lcp { .. } => "lcp",
            Problem::LinSys { .. } => "linsys",
            Problem::Union { .. } => "union",
            Problem::PlFunction { .. } => "pl_function",
            Problem::Sublinear { .. } => "sublinear",
            Problem::BlackBox(_) => "blackbox",
        }
    }

    /// The mapping of a `lcp`, `linsys` or `union` problem.
    pub fn mapping(&self) -> Result<Option<StratifiedMapping<f64>>> {
        Ok(Some(match &self.problem {
            Problem::Lcp { m } => build_lcp(m).map_err(|e| e.context("M"))?,
            Problem::LinSys { a, k } => {
                let k = k.build("K")?;
                if a.len() != k.dim() {
                    return Err(Error::Schema(format!("A has {} rows but K lives in dimension {}", a.len(), k.dim())));
                }
                if a.iter().any(|r| r.len() != a[0].len()) || a.first().is_some_and(|r| r.is_empty()) {
                    return Err(Error::Schema("A: rows must be nonempty and of equal length".into()));
                }
                build_linear_system(a, &k)?
            }
            Problem::Union { n, pieces } => {
                let ps = pieces.iter().enumerate().map(|(i, p)| p.build(&format!("pieces[{i}]"))).collect::<Result<Vec<_>>>()?;
                stratify_union(*n, &ps, UNION_BUDGET)?
            }
            _ => return Ok(None),
        }))
    }

    /// The function of a `pl_function` or `sublinear` problem (`σ_D` for the latter).
    pub fn pl_function(&self) -> Result<Option<PlFunction<f64>>> {
        match &self.problem {
            Problem::PlFunction { n, cells } => {
                let built = cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| Ok(PlCell { set: c.set.build(&format!("cells[{i}].C"))?, g: c.g.clone(), c: c.c }))
                    .collect::<Result<Vec<_>>>()?;
                let n = match (n, built.first()) {
                    (Some(n), _) => *n,
                    (None, Some(c)) => c.set.dim(),
                    (None, None) => return Err(Error::Schema("cells: at least one cell is required".into())),
                };
                Ok(Some(PlFunction::new(n, built)?))
            }
            Problem::Sublinear { d } => Ok(Some(PlFunction::support_of(&d.build("D")?)?)),
            _ => Ok(None),
        }
    }

    /// Input dimension of the problem's mapping or function.
    pub fn input_dim(&self) -> Result<usize> {
        if let Some(s) = self.mapping()? {
            return Ok(s.n);
        }
        if let Some(f) = self.pl_function()? {
            return Ok(f.n);
        }
        Ok(2)
    }
}

/// `+∞`, `-∞` and NaN as the strings `"inf"`, `"-inf"`, `"nan"`; finite values as numbers.
pub fn num(v: f64) -> Value {
    if v.is_nan() {
        Value::from("nan")
    } else if v == f64::INFINITY {
        Value::from("inf")
    } else if v == f64::NEG_INFINITY {
        Value::from("-inf")
    } else {
        Value::from(v)
    }
}

/// Inverse of [`num`].
pub fn parse_num(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

/// A polyhedron as its inequality data plus generators when it is nonempty.
pub fn poly_json(p: &HPolyhedron<f64>) -> Value {
    let mut out = serde_json::to_value(PolySpec::of(p)).expect("plain data");
    if let Some(v) = p.vrep() {
        let rows = |r: &[Vec<f64>]| Value::Array(r.iter().map(|x| nums(x)).collect());
        out["vertices"] = rows(&v.vertices);
        out["rays"] = rows(&v.rays);
        out["lineality"] = rows(&v.lineality);
    } else {
        out["empty"] = Value::Bool(true);
    }
    out
}

/// Witness file `{"x": .., "xp": .., "up": .., "radius": .., "kappa": .., "ratio": ..}`.
pub fn witness_json(w: &Witness<f64>) -> Value {
    serde_json::json!({
        "x": nums(&w.x),
        "xp": nums(&w.xp),
        "up": nums(&w.up),
        "radius": num(w.radius),
        "kappa": w.kappa.map_or(Value::Null, num),
        "ratio": num(w.ratio),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWitness {
    x: Vec<f64>,
    xp: Vec<f64>,
    up: Vec<f64>,
    radius: f64,
    kappa: Option<Value>,
    ratio: Option<Value>,
}

pub fn parse_witness(text: &str) -> Result<Witness<f64>> {
    let raw: RawWitness = serde_json::from_str(text).map_err(|e| Error::Schema(format!("witness: {e}")))?;
    let kappa = match raw.kappa {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_num(&v).ok_or_else(|| Error::Schema("witness.kappa: expected a number".into()))?),
    };
    let ratio = match raw.ratio {
        None | Some(Value::Null) => f64::NAN,
        Some(v) => parse_num(&v).ok_or_else(|| Error::Schema("witness.ratio: expected a number".into()))?,
    };
    if !(raw.radius > 0.0) {
        return Err(Error::Schema("witness.radius must be positive".into()));
    }
    Ok(Witness { x: raw.x, xp: raw.xp, up: raw.up, radius: raw.radius, kappa, ratio })
}

/// Witness file for a function estimate: `{"x": .., "xp": .., "radius": .., "ratio": ..,
/// "outside_domain": ..}`.
pub fn function_witness_json(w: &FunctionWitness<f64>) -> Value {
    serde_json::json!({
        "x": nums(&w.x),
        "xp": nums(&w.xp),
        "radius": num(w.radius),
        "ratio": num(w.ratio),
        "outside_domain": w.outside_domain,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctionWitness {
    x: Vec<f64>,
    xp: Vec<f64>,
    radius: f64,
    ratio: Option<Value>,
    #[serde(default)]
    outside_domain: bool,
}

pub fn parse_function_witness(text: &str) -> Result<FunctionWitness<f64>> {
    let raw: RawFunctionWitness = serde_json::from_str(text).map_err(|e| Error::Schema(format!("witness: {e}")))?;
    let ratio = match raw.ratio {
        None | Some(Value::Null) => f64::NAN,
        Some(v) => parse_num(&v).ok_or_else(|| Error::Schema("witness.ratio: expected a number".into()))?,
    };
    if raw.x.len() != raw.xp.len() {
        return Err(Error::Schema("witness: x and xp differ in length".into()));
    }
    Ok(FunctionWitness { x: raw.x, xp: raw.xp, radius: raw.radius, ratio, outside_domain: raw.outside_domain })
}
