use serde_json::{json, Value};

use polylip::coderivative::{
    check_criterion, coderivative as classical_coderivative, directional_sufficiency_check, kernel_of, neighborhood_necessity_check,
    neighborhood_sufficiency_check, projectional_coderivative, PhMap,
};
use polylip::functions::{level_set_analysis, relative_lip_modulus, subdiff_report, sublinear_analysis, PlFunction};
use polylip::geometry::{horizon_cone, HPolyhedron};
use polylip::io::{
    function_witness_json, num, nums, parse_function_witness, parse_num, parse_witness, poly_json, witness_json, Analysis, BlackBox, Problem,
    ProblemFile, SetSpec,
};
use polylip::oracle::{
    disk_example, estimate_function_modulus, estimate_modulus, hyperbola_example, ratio_along_pairs, replay_witness, FnBox, SampleConfig,
};
use polylip::reproduce;
use polylip::stratified::StratifiedMapping;

use crate::render::{self, fmt, fmt_polys, fmt_union, fmt_vec};
use crate::{schema, Failure, Output, Settings};

type Res = Result<Output, Failure>;

pub fn apply_overrides(p: &mut ProblemFile, st: &Settings) -> Result<(), Failure> {
    if let Some(s) = st.seed {
        p.sampling.seed = s;
    }
    if let Some(n) = st.pairs {
        p.sampling.pairs_per_radius = n;
    }
    if let Some(v) = &st.v {
        p.query.v = Some(v.clone());
    }
    if let Some(k) = st.kappa {
        if !(k >= 0.0) {
            return Err(schema("kappa must be nonnegative"));
        }
        p.query.kappa = Some(k);
    }
    p.sampling.validate()?;
    Ok(())
}

type BoxedFn = Box<dyn Fn(&[f64]) -> f64 + Sync>;

enum Target {
    Map(StratifiedMapping<f64>),
    Function(PlFunction<f64>),
    Black(BlackBox),
}

fn target(p: &ProblemFile) -> Result<Target, Failure> {
    if let Some(s) = p.mapping()? {
        return Ok(Target::Map(s));
    }
    if let Some(f) = p.pl_function()? {
        return Ok(Target::Function(f));
    }
    match &p.problem {
        Problem::BlackBox(b) => Ok(Target::Black(*b)),
        _ => unreachable!("every kind is a mapping, a function or a black box"),
    }
}

fn black_box(b: BlackBox) -> (BoxedFn, HPolyhedron<f64>) {
    match b {
        BlackBox::Disk => {
            let (h, dom) = disk_example::<f64>();
            (Box::new(move |y: &[f64]| (h.f)(y)), dom)
        }
        BlackBox::Hyperbola => {
            let (h, dom) = hyperbola_example::<f64>();
            (Box::new(move |y: &[f64]| (h.f)(y)), dom)
        }
    }
}

fn input_dim(t: &Target) -> usize {
    match t {
        Target::Map(s) => s.n,
        Target::Function(f) => f.n,
        Target::Black(_) => 2,
    }
}

/// `X` from the query. When omitted it is the mapping's domain if one is known, the domain of
/// a support function or black box, and the whole space otherwise.
fn resolve_x(p: &ProblemFile, t: &Target) -> Result<HPolyhedron<f64>, Failure> {
    let n = input_dim(t);
    let known_domain = || -> Option<HPolyhedron<f64>> {
        match (t, &p.problem) {
            (Target::Map(s), _) => s.domain().cloned(),
            (_, Problem::Sublinear { d }) => d.build("D").ok().map(|d| horizon_cone(&d).polar().as_polyhedron().clone()),
            (Target::Function(f), _) if f.cells.len() == 1 => Some(f.cells[0].set.clone()),
            (Target::Black(b), _) => Some(black_box(*b).1),
            _ => None,
        }
    };
    let x = match &p.query.x_set {
        Some(SetSpec::Full) => HPolyhedron::full(n),
        Some(SetSpec::Domain) => known_domain().ok_or_else(|| {
            Failure::from(polylip::Error::Unsupported(format!(
                "query.X = \"domain\": no polyhedral domain description is available for kind `{}`; give X explicitly",
                p.kind()
            )))
        })?,
        Some(SetSpec::Poly(spec)) => spec.build("query.X")?,
        None => match t {
            Target::Function(_) => HPolyhedron::full(n),
            _ => known_domain().unwrap_or_else(|| HPolyhedron::full(n)),
        },
    };
    if x.dim() != n {
        return Err(schema(format!("query.X: lives in dimension {}, the problem in {n}", x.dim())));
    }
    Ok(x)
}

fn vector(v: &Option<Vec<f64>>, name: &str, len: usize) -> Result<Vec<f64>, Failure> {
    let v = v.as_ref().ok_or_else(|| schema(format!("{name}: missing")))?;
    if v.len() != len {
        return Err(schema(format!("{name}: expected {len} entries, got {}", v.len())));
    }
    Ok(v.clone())
}

fn mapping_query<'a>(p: &ProblemFile, t: &'a Target, cmd: &str) -> Result<(&'a StratifiedMapping<f64>, HPolyhedron<f64>, Vec<f64>, Vec<f64>), Failure> {
    let Target::Map(s) = t else {
        return Err(schema(format!("`{cmd}` expects an lcp, linsys or union problem, got `{}`", p.kind())));
    };
    let x_set = resolve_x(p, t)?;
    let x = vector(&p.query.x, "query.x", s.n)?;
    let u = vector(&p.query.u, "query.u", s.m)?;
    Ok((s, x_set, x, u))
}

fn function_query<'a>(p: &ProblemFile, t: &'a Target, cmd: &str) -> Result<(&'a PlFunction<f64>, HPolyhedron<f64>, Vec<f64>), Failure> {
    let Target::Function(f) = t else {
        return Err(schema(format!("`{cmd}` expects a pl_function or sublinear problem, got `{}`", p.kind())));
    };
    let x_set = resolve_x(p, t)?;
    let x = vector(&p.query.x, "query.x", f.n)?;
    Ok((f, x_set, x))
}

fn header(cmd: &str, p: &ProblemFile) -> Value {
    json!({"command": cmd, "kind": p.kind()})
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn sampling_json(cfg: &SampleConfig) -> Value {
    serde_json::to_value(cfg).expect("plain data")
}

pub fn criterion(p: &ProblemFile) -> Res {
    let t = target(p)?;
    let (s, x_set, x, u) = mapping_query(p, &t, "criterion")?;
    let r = check_criterion(s, &x_set, &x, &u)?;
    let analyses = if p.query.analyses.is_empty() {
        vec![Analysis::Necessity, Analysis::Sufficiency, Analysis::Directional]
    } else {
        p.query.analyses.clone()
    };
    let cfg = &p.sampling;
    let radius = *cfg.radii.last().expect("validated");
    let kappa = p.query.kappa.unwrap_or(r.modulus);
    let mut checks = json!({"necessity": null, "sufficiency": null, "directional": null});
    let mut md_checks = Vec::new();
    for a in &analyses {
        match a {
            Analysis::Necessity | Analysis::Sufficiency => {
                let key = if *a == Analysis::Necessity { "necessity" } else { "sufficiency" };
                let value = if kappa.is_finite() {
                    let c = if *a == Analysis::Necessity {
                        neighborhood_necessity_check(s, &x_set, &x, &u, kappa, radius, cfg.pairs_per_radius, cfg.seed)?
                    } else {
                        neighborhood_sufficiency_check(s, &x_set, &x, &u, kappa, radius, cfg.pairs_per_radius, cfg.seed)?
                    };
                    md_checks.push(format!("| {key} (κ = {}, radius {radius}) | {} |", fmt(kappa), if c.passed() { "pass" } else { "violated" }));
                    merge(render::check(&c), json!({"kappa": num(kappa), "radius": radius}))
                } else {
                    md_checks.push(format!("| {key} | skipped: infinite modulus and no κ given |"));
                    json!({"skipped": "modulus is infinite and no kappa was given"})
                };
                checks[key] = value;
            }
            Analysis::Directional => {
                let d = directional_sufficiency_check(s, &x_set, &x, &u)?;
                md_checks.push(format!(
                    "| directional | {} ({} failing of {} directions) |",
                    if d.passed() { "pass" } else { "fails" },
                    d.failing.len(),
                    d.directions.len()
                ));
                for f in &d.failing {
                    md_checks.push(format!("| direction {} {} | kernel {} |", fmt_vec(&f.x), fmt_vec(&f.u), fmt_union(&f.kernel)));
                }
                checks["directional"] = render::directional(&d);
            }
            Analysis::Oracle => {
                let e = estimate_modulus(s, &x_set, &x, &u, cfg, p.query.kappa)?;
                md_checks.push(format!("| oracle lower bound | {} |", fmt(e.estimate())));
                checks["oracle"] = json!({"lower_bounds": render::bounds(&e.lower_bounds), "trend": render::trend(e.trend), "estimate": num(e.estimate())});
            }
        }
    }
    let kernel_witness = r.kernel_witness.as_ref().map_or(Value::Null, |(xs, us)| json!({"xstar": nums(xs), "ustar": nums(us)}));
    let json = merge(
        header("criterion", p),
        json!({
            "x": nums(&x), "u": nums(&u), "X": poly_json(&x_set),
            "criterion": r.holds,
            "modulus": num(r.modulus),
            "kernel_witness": kernel_witness,
            "witness": render::pair(&r.witness),
            "per_stratum": r.per_stratum.iter().map(|k| json!({"label": k.label, "kappa": num(k.kappa)})).collect::<Vec<_>>(),
            "checks": checks,
        }),
    );
    let mut md = format!(
        "# Lipschitz-like criterion\n\nProblem `{}` at x̄ = {}, ū = {}.\n\n- criterion holds: **{}**\n- modulus: **{}**\n",
        p.kind(),
        fmt_vec(&x),
        fmt_vec(&u),
        r.holds,
        fmt(r.modulus)
    );
    if let Some((xs, _)) = &r.kernel_witness {
        md += &format!("- nonzero kernel element x* = {}\n", fmt_vec(xs));
    }
    md += "\n| stratum | κ |\n|---|---|\n";
    for k in &r.per_stratum {
        md += &format!("| {} | {} |\n", k.label, fmt(k.kappa));
    }
    if !md_checks.is_empty() {
        md += "\n| check | result |\n|---|---|\n";
        md += &md_checks.join("\n");
        md += "\n";
    }
    let summary = format!("criterion holds: {}\nmodulus: {}\n", r.holds, fmt(r.modulus));
    Ok(Output { json, markdown: md, files: Vec::new(), summary, success: true })
}

pub fn modulus(p: &ProblemFile) -> Res {
    let t = target(p)?;
    match &t {
        Target::Map(_) => {
            let (s, x_set, x, u) = mapping_query(p, &t, "modulus")?;
            let r = check_criterion(s, &x_set, &x, &u)?;
            let json = merge(
                header("modulus", p),
                json!({"x": nums(&x), "u": nums(&u), "X": poly_json(&x_set), "modulus": num(r.modulus), "criterion": r.holds, "witness": render::pair(&r.witness)}),
            );
            let md = format!("# Modulus\n\nProblem `{}` at x̄ = {}, ū = {}: **{}**\n", p.kind(), fmt_vec(&x), fmt_vec(&u), fmt(r.modulus));
            Ok(Output { json, markdown: md, files: Vec::new(), summary: format!("modulus: {}\n", fmt(r.modulus)), success: true })
        }
        Target::Function(_) => {
            let (f, x_set, x) = function_query(p, &t, "modulus")?;
            let r = relative_lip_modulus(f, &x_set, &x)?;
            let json = merge(
                header("modulus", p),
                json!({
                    "x": nums(&x), "X": poly_json(&x_set),
                    "modulus": num(r.modulus),
                    "witness": render::opt_vec(&r.witness),
                    "profile_modulus": num(r.profile_modulus),
                    "horizon_trivial": r.horizon_trivial,
                    "subgradients": render::polys(&r.subgradients),
                    "horizon": render::union(&r.horizon),
                }),
            );
            let md = format!(
                "# Modulus\n\nFunction at x̄ = {}.\n\n- modulus: **{}**\n- from the profile mapping: {}\n- projectional subdifferential: {}\n- horizon part: {}\n",
                fmt_vec(&x),
                fmt(r.modulus),
                fmt(r.profile_modulus),
                fmt_polys(&r.subgradients),
                fmt_union(&r.horizon)
            );
            Ok(Output { json, markdown: md, files: Vec::new(), summary: format!("modulus: {}\n", fmt(r.modulus)), success: true })
        }
        Target::Black(_) => Err(schema("`modulus` needs a polyhedral problem; use `estimate` for black-box functions")),
    }
}

fn same_graph(a: &PhMap<f64>, b: &PhMap<f64>) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    let inside = |p: &polylip::geometry::ConeUnion<f64>, q: &polylip::geometry::ConeUnion<f64>| {
        p.pieces.iter().all(|k| q.pieces.iter().any(|l| k.is_subset_of(l)))
    };
    inside(&ga, &gb) && inside(&gb, &ga)
}

pub fn coderivative(p: &ProblemFile) -> Res {
    let t = target(p)?;
    let (s, x_set, x, u) = mapping_query(p, &t, "coderivative")?;
    let proj = projectional_coderivative(s, &x_set, &x, &u)?;
    let classical = classical_coderivative(s, &x, &u)?;
    let (kp, kc) = (kernel_of(&proj), kernel_of(&classical));
    let equal = same_graph(&proj, &classical);
    let json = merge(
        header("coderivative", p),
        json!({
            "x": nums(&x), "u": nums(&u), "X": poly_json(&x_set),
            "projectional": render::phmap(&proj),
            "classical": render::phmap(&classical),
            "projectional_kernel_element": render::opt_vec(&kp),
            "classical_kernel_element": render::opt_vec(&kc),
            "graphs_equal": equal,
        }),
    );
    let md = format!(
        "# Coderivatives\n\nGraphs in (u*, x*) coordinates at x̄ = {}, ū = {}.\n\n- projectional: {}\n- classical: {}\n- graphs equal: {equal}\n- nonzero kernel element (projectional): {}\n- nonzero kernel element (classical): {}\n",
        fmt_vec(&x),
        fmt_vec(&u),
        fmt_union(&proj.graph()),
        fmt_union(&classical.graph()),
        kp.as_deref().map_or("none".into(), fmt_vec),
        kc.as_deref().map_or("none".into(), fmt_vec),
    );
    let summary = format!("projectional kernel trivial: {}\nclassical kernel trivial: {}\n", kp.is_none(), kc.is_none());
    Ok(Output { json, markdown: md, files: Vec::new(), summary, success: true })
}

pub fn subdiff(p: &ProblemFile) -> Res {
    let t = target(p)?;
    let (f, x_set, x) = function_query(p, &t, "subdiff")?;
    let v = match &p.query.v {
        Some(_) => Some(vector(&p.query.v, "v", f.n)?),
        None => None,
    };
    let r = subdiff_report(f, &x_set, &x, v.as_deref())?;
    let json = merge(
        header("subdiff", p),
        json!({
            "x": nums(&x), "X": poly_json(&x_set),
            "basic": render::polys(&r.basic),
            "horizon": render::union(&r.horizon),
            "projectional": render::polys(&r.projectional),
            "projectional_horizon": render::union(&r.projectional_horizon),
            "outer_limiting_v": r.outer_limiting_v.as_deref().map_or(Value::Null, render::polys),
        }),
    );
    let mut md = format!(
        "# Subdifferentials\n\nAt x̄ = {}.\n\n| set | value |\n|---|---|\n| ∂f | {} |\n| ∂^∞f | {} |\n| ∂_X f | {} |\n| ∂^∞_X f | {} |\n",
        fmt_vec(&x),
        fmt_polys(&r.basic),
        fmt_union(&r.horizon),
        fmt_polys(&r.projectional),
        fmt_union(&r.projectional_horizon)
    );
    if let (Some(o), Some(v)) = (&r.outer_limiting_v, &v) {
        md += &format!("| ∂^>_v̄ f, v̄ = {} | {} |\n", fmt_vec(v), fmt_polys(o));
    }
    Ok(Output { json, markdown: md, files: Vec::new(), summary: format!("∂_X f(x̄) = {}\n", fmt_polys(&r.projectional)), success: true })
}

pub fn levelset(p: &ProblemFile) -> Res {
    let t = target(p)?;
    let Target::Function(f) = &t else {
        return Err(schema(format!("`levelset` expects a pl_function or sublinear problem, got `{}`", p.kind())));
    };
    let x = vector(&p.query.x, "query.x", f.n)?;
    let v = vector(&p.query.v, "v (pass --v or query.v)", f.n)?;
    let r = level_set_analysis(f, &x, &v)?;
    let json = merge(
        header("levelset", p),
        json!({
            "x": nums(&x), "v": nums(&v),
            "relative_llp": r.relative_llp,
            "lip_X": num(r.lip_x),
            "classical_lip": num(r.classical_lip),
            "coderivative_lip_X": num(r.coderivative_lip_x),
            "outer_limiting": render::polys(&r.outer),
            "basic": render::polys(&r.basic),
        }),
    );
    let md = format!(
        "# Level-set mapping\n\nx̄ = {}, v̄ = {}; X = {{α ≥ f(x̄) - ⟨v̄, x̄⟩}}.\n\n| quantity | value |\n|---|---|\n| Lipschitz-like relative to X | {} |\n| modulus relative to X | {} |\n| same, from the coderivative | {} |\n| classical modulus | {} |\n| ∂^>_v̄ f(x̄) | {} |\n| ∂f(x̄) | {} |\n",
        fmt_vec(&x),
        fmt_vec(&v),
        r.relative_llp,
        fmt(r.lip_x),
        fmt(r.coderivative_lip_x),
        fmt(r.classical_lip),
        fmt_polys(&r.outer),
        fmt_polys(&r.basic)
    );
    let summary = format!("lip_X: {}\nclassical lip: {}\n", fmt(r.lip_x), fmt(r.classical_lip));
    Ok(Output { json, markdown: md, files: Vec::new(), summary, success: true })
}

pub fn sublinear(p: &ProblemFile) -> Res {
    let Problem::Sublinear { d } = &p.problem else {
        return Err(schema(format!("`sublinear` expects a sublinear problem, got `{}`", p.kind())));
    };
    let d = d.build("D")?;
    let r = sublinear_analysis(&d)?;
    let pairs: Vec<Value> = r
        .pairs
        .iter()
        .map(|fp| {
            json!({
                "x": nums(&fp.x), "face": poly_json(&fp.face), "cone_face": render::cone(&fp.cone_face),
                "recession_matches": fp.recession_matches, "excess": num(fp.excess), "bounded": fp.bounded,
            })
        })
        .collect();
    let json = merge(
        header("sublinear", p),
        json!({
            "pairs": pairs,
            "subgradients": render::polys(&r.subgradients),
            "projection_of_D": render::polys(&r.projection_of_d),
            "bounded_faces": render::polys(&r.bounded_faces),
            "modulus": num(r.modulus),
            "subgradient_norm": num(r.subgradient_norm),
        }),
    );
    let mut md = format!(
        "# Support function\n\n- modulus at 0 relative to its domain: **{}**\n- largest projectional subgradient: {}\n\n| exposing x | face of D | face of the recession cone | recession cones match | excess |\n|---|---|---|---|---|\n",
        fmt(r.modulus),
        fmt(r.subgradient_norm)
    );
    for fp in &r.pairs {
        md += &format!(
            "| {} | {} | {} | {} | {} |\n",
            fmt_vec(&fp.x),
            render::fmt_poly(&fp.face),
            render::fmt_cone(&fp.cone_face),
            fp.recession_matches,
            fmt(fp.excess)
        );
    }
    Ok(Output { json, markdown: md, files: Vec::new(), summary: format!("modulus: {}\n", fmt(r.modulus)), success: true })
}

fn function_box(t: &Target) -> Option<(usize, BoxedFn)> {
    match t {
        Target::Map(_) => None,
        Target::Function(f) => {
            let f = f.clone();
            Some((f.n, Box::new(move |y: &[f64]| f.value(y))))
        }
        Target::Black(b) => Some((2, black_box(*b).0)),
    }
}

pub fn estimate(p: &ProblemFile) -> Res {
    let t = target(p)?;
    let cfg = &p.sampling;
    let (json, witness_file, est, trend) = if let Target::Map(_) = t {
        let (s, x_set, x, u) = mapping_query(p, &t, "estimate")?;
        let r = estimate_modulus(s, &x_set, &x, &u, cfg, p.query.kappa)?;
        let json = json!({
            "x": nums(&x), "u": nums(&u), "X": poly_json(&x_set),
            "lower_bounds": render::bounds(&r.lower_bounds),
            "trend": render::trend(r.trend),
            "estimate": num(r.estimate()),
            "witness": r.witness.as_ref().map_or(Value::Null, witness_json),
            "verdict": render::verdict(&r.verdict),
        });
        (json, r.witness.as_ref().map(witness_json), r.estimate(), r.trend)
    } else {
        let (n, h) = function_box(&t).expect("function target");
        let h = FnBox::new(n, h);
        let x_set = resolve_x(p, &t)?;
        let x = vector(&p.query.x, "query.x", n)?;
        let r = estimate_function_modulus(&h, &x_set, &x, cfg, p.query.kappa)?;
        let json = json!({
            "x": nums(&x), "X": poly_json(&x_set),
            "lower_bounds": render::bounds(&r.lower_bounds),
            "trend": render::trend(r.trend),
            "estimate": num(r.estimate()),
            "witness": r.witness.as_ref().map_or(Value::Null, function_witness_json),
            "verdict": render::verdict(&r.verdict),
        });
        (json, r.witness.as_ref().map(function_witness_json), r.estimate(), r.trend)
    };
    let json = merge(merge(header("estimate", p), json!({"sampling": sampling_json(cfg)})), json);
    let mut md = format!("# Sampled modulus\n\nSeed {}, {} pairs per radius.\n\n| radius | largest ratio |\n|---|---|\n", cfg.seed, cfg.pairs_per_radius);
    for b in json["lower_bounds"].as_array().expect("array") {
        let value = |v: &Value| parse_num(v).map_or_else(|| v.to_string(), fmt);
        md += &format!("| {} | {} |\n", value(&b["radius"]), value(&b["ratio"]));
    }
    md += &format!("\nTrend: {trend:?}. Verdict: {}.\n", json["verdict"]);
    let files = witness_file.map(|w| vec![("witness.json".to_string(), serde_json::to_string_pretty(&w).expect("plain data") + "\n")]).unwrap_or_default();
    let summary = format!("estimate: {}\ntrend: {trend:?}\n", fmt(est));
    Ok(Output { json, markdown: md, files, summary, success: true })
}

fn same_number(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

pub fn replay(p: &ProblemFile, text: &str) -> Res {
    let t = target(p)?;
    let (json, valid, reproduces, ratio) = if let Target::Map(_) = t {
        let (s, x_set, x, u) = mapping_query(p, &t, "estimate --replay")?;
        let w = parse_witness(text)?;
        let r = replay_witness(s, &x_set, &x, &u, &w)?;
        let reproduces = same_number(r.ratio, w.ratio);
        let json = json!({
            "witness": witness_json(&w), "valid": r.valid, "ratio": num(r.ratio), "recorded_ratio": num(w.ratio),
            "violates": r.violates, "reproduces": reproduces,
        });
        (json, r.valid, reproduces, r.ratio)
    } else {
        let (n, h) = function_box(&t).expect("function target");
        let h = FnBox::new(n, h);
        let x_set = resolve_x(p, &t)?;
        let x = vector(&p.query.x, "query.x", n)?;
        let w = parse_function_witness(text)?;
        if w.x.len() != n {
            return Err(schema(format!("witness: expected points with {n} entries")));
        }
        let near = |y: &[f64]| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= w.radius * (1.0 + 1e-12));
        let valid = x_set.contains(&w.x) && x_set.contains(&w.xp) && near(&w.x) && near(&w.xp);
        let ratio = ratio_along_pairs(&h, &[(w.x.clone(), w.xp.clone())])[0];
        let reproduces = same_number(ratio, w.ratio);
        let json = json!({"witness": function_witness_json(&w), "valid": valid, "ratio": num(ratio), "recorded_ratio": num(w.ratio), "reproduces": reproduces});
        (json, valid, reproduces, ratio)
    };
    let json = merge(header("estimate-replay", p), json);
    let md = format!("# Witness replay\n\n- inside X and the neighbourhood: {valid}\n- ratio: {}\n- matches the recorded ratio: {reproduces}\n", fmt(ratio));
    let summary = format!("replayed ratio: {}\nreproduces: {reproduces}\n", fmt(ratio));
    Ok(Output { json, markdown: md, files: Vec::new(), summary, success: valid && reproduces })
}

pub fn reproduce(criteria: Option<&[u8]>) -> Res {
    let ids: Vec<u8> = match criteria {
        Some(ids) => {
            if let Some(bad) = ids.iter().find(|id| !reproduce::CRITERIA.iter().any(|c| c.0 == **id)) {
                return Err(schema(format!("--criteria: no criterion {bad}")));
            }
            ids.to_vec()
        }
        None => reproduce::CRITERIA.iter().map(|c| c.0).collect(),
    };
    let results: Vec<reproduce::CriterionResult> = ids.iter().map(|id| reproduce::run(*id)).collect();
    let passed = results.iter().all(|r| r.passed);
    let mut table = String::from("| # | criterion | result | seconds | detail |\n|---|---|---|---|---|\n");
    let mut summary = String::new();
    for r in &results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        table += &format!("| {} | {} | {mark} | {:.2} | {} |\n", r.id, r.name, r.seconds, r.detail.replace('|', "\\|"));
        summary += &format!("{mark}  {:>2}  {:<40} {:>7.2}s  {}\n", r.id, r.name, r.seconds, r.detail);
    }
    summary += &format!("{} of {} criteria passed\n", results.iter().filter(|r| r.passed).count(), results.len());
    let json = json!({
        "command": "reproduce-paper",
        "passed": passed,
        "criteria": results.iter().map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail, "seconds": r.seconds})).collect::<Vec<_>>(),
    });
    let md = format!("# Acceptance suite\n\n{table}");
    Ok(Output { json, markdown: md, files: Vec::new(), summary, success: passed })
}
