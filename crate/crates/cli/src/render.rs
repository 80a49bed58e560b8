//! JSON and markdown fragments shared by the subcommands.

use serde_json::{json, Value};

use polylip::coderivative::{CheckOutcome, DirectionalReport, PhMap};
use polylip::geometry::{ConeUnion, HPolyhedron, PolyCone};
use polylip::io::{num, nums, poly_json};
use polylip::oracle::{RadiusBound, Trend, Verdict};

pub fn cone(k: &PolyCone<f64>) -> Value {
    let g = k.generators();
    json!({
        "rays": g.rays.iter().map(|r| nums(r)).collect::<Vec<_>>(),
        "lineality": g.lineality.iter().map(|r| nums(r)).collect::<Vec<_>>(),
    })
}

pub fn union(u: &ConeUnion<f64>) -> Value {
    Value::Array(u.pieces.iter().map(cone).collect())
}

pub fn polys(ps: &[HPolyhedron<f64>]) -> Value {
    Value::Array(ps.iter().map(poly_json).collect())
}

pub fn opt_vec(v: &Option<Vec<f64>>) -> Value {
    v.as_ref().map_or(Value::Null, |v| nums(v))
}

/// `(u*, x*)` pair as an object.
pub fn pair(p: &Option<(Vec<f64>, Vec<f64>)>) -> Value {
    p.as_ref().map_or(Value::Null, |(u, x)| json!({"ustar": nums(u), "xstar": nums(x)}))
}

pub fn phmap(h: &PhMap<f64>) -> Value {
    json!({"m": h.m, "n": h.n, "graph": union(&h.graph())})
}

pub fn check(c: &CheckOutcome<f64>) -> Value {
    match c {
        CheckOutcome::Pass { samples, worst } => json!({"passed": true, "samples": samples, "worst": num(*worst)}),
        CheckOutcome::Witness(v) => json!({
            "passed": false,
            "violation": {"x": nums(&v.x), "u": nums(&v.u), "xstar": nums(&v.xstar), "ustar": nums(&v.ustar), "w": nums(&v.w), "ratio": num(v.ratio)},
        }),
    }
}

pub fn directional(r: &DirectionalReport<f64>) -> Value {
    json!({
        "passed": r.passed(),
        "condition_i": r.condition_i,
        "directions_examined": r.directions.len(),
        "failing": r.failing.iter().map(|f| json!({"x": nums(&f.x), "u": nums(&f.u), "kernel": union(&f.kernel)})).collect::<Vec<_>>(),
    })
}

pub fn bounds(b: &[RadiusBound<f64>]) -> Value {
    Value::Array(b.iter().map(|b| json!({"radius": num(b.radius), "ratio": num(b.ratio)})).collect())
}

pub fn trend(t: Trend) -> Value {
    serde_json::to_value(t).expect("unit enum")
}

pub fn verdict(v: &Option<Verdict<f64>>) -> Value {
    match v {
        None => Value::Null,
        Some(Verdict::ConsistentWith(k)) => json!({"consistent_with": num(*k)}),
        Some(Verdict::Falsifies(k)) => json!({"falsifies": num(*k)}),
    }
}

pub fn fmt(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "+∞".into() } else { "-∞".into() }
    } else {
        // integers up to rounding print as integers; everything else at full precision
        let r = v.round();
        if (v - r).abs() <= 1e-12 * r.abs().max(1.0) { format!("{}", r + 0.0) } else { format!("{v}") }
    }
}

pub fn fmt_vec(v: &[f64]) -> String {
    format!("({})", v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(", "))
}

pub fn fmt_cone(k: &PolyCone<f64>) -> String {
    let g = k.generators();
    if g.rays.is_empty() && g.lineality.is_empty() {
        return "{0}".into();
    }
    let mut parts: Vec<String> = g.rays.iter().map(|r| format!("ℝ₊{}", fmt_vec(r))).collect();
    parts.extend(g.lineality.iter().map(|r| format!("ℝ{}", fmt_vec(r))));
    parts.join(" + ")
}

/// The union with pieces contained in other pieces dropped, for display.
fn maximal(u: &ConeUnion<f64>) -> Vec<&PolyCone<f64>> {
    let mut kept: Vec<&PolyCone<f64>> = Vec::new();
    for (i, k) in u.pieces.iter().enumerate() {
        let covered = u.pieces.iter().enumerate().any(|(j, l)| {
            j != i && k.is_subset_of(l) && (!l.is_subset_of(k) || j < i)
        });
        if !covered {
            kept.push(k);
        }
    }
    kept
}

pub fn fmt_union(u: &ConeUnion<f64>) -> String {
    if u.pieces.is_empty() {
        return "∅".into();
    }
    maximal(u).into_iter().map(fmt_cone).collect::<Vec<_>>().join(" ∪ ")
}

pub fn fmt_poly(p: &HPolyhedron<f64>) -> String {
    match p.vrep() {
        None => "∅".into(),
        Some(v) => {
            let hull = format!("conv{{{}}}", v.vertices.iter().map(|w| fmt_vec(w)).collect::<Vec<_>>().join(", "));
            let mut parts = vec![hull];
            parts.extend(v.rays.iter().map(|r| format!("ℝ₊{}", fmt_vec(r))));
            parts.extend(v.lineality.iter().map(|r| format!("ℝ{}", fmt_vec(r))));
            parts.join(" + ")
        }
    }
}

pub fn fmt_polys(ps: &[HPolyhedron<f64>]) -> String {
    if ps.is_empty() {
        return "∅".into();
    }
    ps.iter().map(fmt_poly).collect::<Vec<_>>().join(" ∪ ")
}
