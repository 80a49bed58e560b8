//! The acceptance suite: worked examples with known answers, randomised agreement between the
//! exact engine and the sampling oracle, and seeded property sweeps.
//!
//! Each criterion returns a [`CriterionResult`] rather than panicking, so the command line and
//! the test harness can both print one line per criterion.

pub mod instances;
pub mod properties;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use properties::same_graph;

use crate::coderivative::{check_criterion, coderivative, directional_sufficiency_check, kernel_of, projectional_coderivative};
use crate::error::Result;
use crate::functions::{level_set_analysis, sublinear_analysis, PlFunction};
use crate::geometry::{horizon_cone, HPolyhedron, VRep};
use crate::linalg::norm;
use crate::oracle::{disk_example, estimate_function_modulus, estimate_modulus, hyperbola_example, ratio_along_pairs, trend_along, FnBox, SampleConfig, Trend};
use crate::stratified::{build_lcp, StratifiedMapping};

/// `√((3 + √5)/2)`, the golden ratio.
pub fn golden() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).sqrt()
}

/// The LCP matrix of the worked example.
pub fn example_lcp_matrix() -> Vec<Vec<f64>> {
    vec![vec![-1.0, 0.0], vec![1.0, 1.0]]
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "LCP modulus relative to the domain"),
    (2, "LCP per-stratum constants"),
    (3, "smallest singular value identity"),
    (4, "directional condition fails on the LCP"),
    (5, "linear-system mappings"),
    (6, "level-set table for |x|"),
    (7, "oracle agrees with the exact modulus"),
    (8, "non-polyhedral function examples"),
    (9, "property sweeps"),
    (10, "support functions of polyhedra"),
];

/// Runs one criterion by number.
pub fn run(id: u8) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown criterion", |c| c.1);
    let start = Instant::now();
    let outcome = match id {
        1 => lcp_reproduction(),
        2 => kappa_table(),
        3 => singular_value_identity(),
        4 => directional_failure(),
        5 => linear_systems(20, 5),
        6 => level_set_table(),
        7 => oracle_agreement(10_000),
        8 => nonpolyhedral_examples(),
        9 => property_sweeps(200, 9),
        10 => sublinear_suite(10, 10),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult { id, name, passed, detail, seconds }
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| run(c.0)).collect()
}

type Outcome = Result<(bool, String)>;

fn lcp() -> Result<(StratifiedMapping<f64>, HPolyhedron<f64>)> {
    let s = build_lcp(&example_lcp_matrix())?;
    let dom = s.domain().expect("the example LCP has a convex domain").clone();
    Ok((s, dom))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a.is_infinite() && b.is_infinite() && a.signum() == b.signum()) || (a - b).abs() <= tol
}

/// Whether a union of generator descriptions is exactly the ray `ℝ₋ × {0}`.
fn is_negative_first_axis(sets: &[VRep<f64>]) -> bool {
    let mut has_ray = false;
    for v in sets {
        if !v.lineality.is_empty() || v.vertices.iter().any(|w| norm(w) > 1e-9) {
            return false;
        }
        for r in &v.rays {
            if r[0] >= -1e-9 || r[1].abs() > 1e-9 * norm(r) {
                return false;
            }
            has_ray = true;
        }
    }
    has_ray
}

fn lcp_reproduction() -> Outcome {
    let start = Instant::now();
    let (s, dom) = lcp()?;
    let z = [0.0, 0.0];
    let r = check_criterion(&s, &dom, &z, &z)?;
    let classical = coderivative(&s, &z, &z)?;
    let kernel_ok = is_negative_first_axis(&classical.evaluate(&z)?);
    let elapsed = start.elapsed().as_secs_f64();
    let modulus_ok = (r.modulus - golden()).abs() <= 1e-9;
    Ok((
        r.holds && modulus_ok && kernel_ok && elapsed < 5.0,
        format!("holds={} modulus={:.12} classical kernel ℝ₋×{{0}}: {kernel_ok}, {elapsed:.2}s", r.holds, r.modulus),
    ))
}

fn kappa_table() -> Outcome {
    let (s, dom) = lcp()?;
    let z = [0.0, 0.0];
    let r = check_criterion(&s, &dom, &z, &z)?;
    let one = ["({2},∅,{1})", "({1},{2},∅)", "({1},∅,{2})", "({2},{1},∅)"];
    let mut bad = Vec::new();
    for k in &r.per_stratum {
        let want = if k.label == "({1,2},∅,∅)" {
            0.0
        } else if one.contains(&k.label.as_str()) {
            1.0
        } else {
            golden()
        };
        if !close(k.kappa, want, 1e-9) {
            bad.push(format!("{} = {} (want {want})", k.label, k.kappa));
        }
    }
    let ok = bad.is_empty() && r.per_stratum.len() == 9;
    Ok((ok, if ok { format!("{} strata match", r.per_stratum.len()) } else { format!("{} strata; mismatches: {}", r.per_stratum.len(), bad.join(", ")) }))
}

/// `1/min_{‖y‖=1} ‖Mᵀy‖ = 1/√λ_min(M Mᵀ)` from the 2×2 characteristic polynomial.
fn singular_value_identity() -> Outcome {
    let m = example_lcp_matrix();
    let g = |i: usize, j: usize| m[i][0] * m[j][0] + m[i][1] * m[j][1];
    let (a, b, d) = (g(0, 0), g(0, 1), g(1, 1));
    let tr = a + d;
    let det = a * d - b * b;
    let lmin = 2.0 * det / (tr + (tr * tr - 4.0 * det).sqrt());
    let value = 1.0 / lmin.sqrt();
    let ok = (value - golden()).abs() <= 1e-12;
    Ok((ok, format!("1/σ_min = {value:.15}, target {:.15}", golden())))
}

fn directional_failure() -> Outcome {
    let (s, dom) = lcp()?;
    let z = [0.0, 0.0];
    let r = directional_sufficiency_check(&s, &dom, &z, &z)?;
    let hit = r.failing.iter().find(|f| close(f.x[0], 0.0, 1e-12) && close(f.x[1], -1.0, 1e-12) && close(f.u[0], 0.0, 1e-12) && close(f.u[1], 1.0, 1e-12));
    let kernel_ok = hit.is_some_and(|f| {
        f.kernel.contains(&[-1.0, 0.0]) && !f.kernel.contains(&[1.0, 0.0]) && !f.kernel.contains(&[0.0, 1.0]) && !f.kernel.contains(&[0.0, -1.0])
    });
    Ok((
        !r.passed() && hit.is_some() && kernel_ok,
        format!("{} failing directions; ((0,-1),(0,1)) reported: {}, kernel ℝ₋×{{0}}: {kernel_ok}", r.failing.len(), hit.is_some()),
    ))
}

fn linear_systems(count: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..count {
        let inst = instances::linear_system(&mut rng)?;
        let (pb, xb) = &inst.boundary;
        let holds = check_criterion(&inst.s, &inst.dom, pb, xb)?.holds;
        let classical_b = coderivative(&inst.s, pb, xb)?;
        let projected_b = projectional_coderivative(&inst.s, &inst.dom, pb, xb)?;
        let differs_on_boundary = kernel_of(&classical_b).is_some() && !same_graph(&classical_b, &projected_b);
        let (pi, xi) = &inst.interior;
        let equal_inside = same_graph(&coderivative(&inst.s, pi, xi)?, &projectional_coderivative(&inst.s, &inst.dom, pi, xi)?);
        if !(holds && differs_on_boundary && equal_inside) {
            failures.push(format!("#{i}: criterion {holds}, boundary differs {differs_on_boundary}, interior equal {equal_inside}"));
        }
    }
    Ok((failures.is_empty(), if failures.is_empty() { format!("{count} instances") } else { failures.join("; ") }))
}

/// The three-branch relative modulus and the classical modulus of the level sets of `|x|`.
pub fn level_set_targets(v: f64) -> (f64, f64) {
    let relative = if v > -1.0 && v < 1.0 {
        1.0 / (1.0 - v).min(1.0 + v)
    } else if v >= 1.0 {
        1.0 / (1.0 + v)
    } else {
        1.0 / (1.0 - v)
    };
    let classical = if (-1.0..=1.0).contains(&v) {
        f64::INFINITY
    } else if v > 1.0 {
        1.0 / (v - 1.0)
    } else {
        1.0 / (-1.0 - v)
    };
    (relative, classical)
}

fn level_set_table() -> Outcome {
    let f = PlFunction::max_affine(&[(vec![1.0], 0.0), (vec![-1.0], 0.0)])?;
    let mut rows = Vec::new();
    let mut ok = true;
    for v in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        let r = level_set_analysis(&f, &[0.0], &[v])?;
        let (rel, cls) = level_set_targets(v);
        let good = close(r.lip_x, rel, 1e-12) && close(r.classical_lip, cls, 1e-12);
        ok &= good;
        rows.push(format!("v̄={v}: {}/{}{}", r.lip_x, r.classical_lip, if good { "" } else { " ✗" }));
    }
    Ok((ok, rows.join(", ")))
}

fn oracle_agreement(pairs: usize) -> Outcome {
    let start = Instant::now();
    let cfg = SampleConfig { seed: 7, radii: vec![1e-3], pairs_per_radius: pairs, ..SampleConfig::default() };
    let mut worst: f64 = 1.0;
    let mut failures = Vec::new();
    let mut check = |label: String, exact: f64, est: f64| {
        let ratio = est / exact;
        worst = worst.min(ratio);
        if !(est >= 0.95 * exact && est <= exact + 1e-3) {
            failures.push(format!("{label}: estimate {est} vs exact {exact}"));
        }
    };
    let (s, dom) = lcp()?;
    let z = [0.0, 0.0];
    let exact = check_criterion(&s, &dom, &z, &z)?.modulus;
    check("LCP".into(), exact, estimate_modulus(&s, &dom, &z, &z, &cfg, None)?.estimate());
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    for i in 0..10 {
        let inst = instances::linear_system(&mut rng)?;
        let (p, x) = &inst.boundary;
        let exact = check_criterion(&inst.s, &inst.dom, p, x)?.modulus;
        check(format!("system #{i}"), exact, estimate_modulus(&inst.s, &inst.dom, p, x, &cfg, None)?.estimate());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && elapsed < 60.0;
    Ok((ok, format!("11 instances, worst estimate/exact {worst:.4}, {elapsed:.1}s{}", if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) })))
}

fn nonpolyhedral_examples() -> Outcome {
    let (h, dom) = disk_example::<f64>();
    let cfg = SampleConfig { seed: 7, ..SampleConfig::default() };
    let disk = estimate_function_modulus(&h, &dom, &[0.0, 0.0], &cfg, None)?.estimate();
    let disk_ok = (disk / 2f64.sqrt() - 1.0).abs() <= 0.05;
    let (g, gdom) = hyperbola_example::<f64>();
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (1..=50).map(|k| k as f64).map(|k| (vec![0.0, -1.0 / k], vec![-1.0 / (k * k), -1.0 / k])).collect();
    let ratios = ratio_along_pairs(&g, &pairs);
    let at_50 = ratios[49];
    let trend = trend_along(&ratios);
    let sampled = estimate_function_modulus(&g, &gdom, &[0.0, 0.0], &cfg, None)?.estimate();
    let trend_ok = matches!(trend, Trend::Unbounded | Trend::Increasing);
    Ok((
        disk_ok && at_50 >= 10.0 * (1.0 - 1e-12) && trend_ok && sampled > 10.0,
        format!("disk {disk:.4} (√2 = 1.4142), hyperbola ratio at k=50 {at_50:.6}, trend {trend:?}, sampled bound {sampled:.3e}"),
    ))
}

fn property_sweeps(cases: usize, seed: u64) -> Outcome {
    use properties::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Vec::new();
    let mut ok = true;
    let mut sweep = |name: &str, rng: &mut ChaCha8Rng, f: &mut dyn FnMut(&mut ChaCha8Rng) -> Result<Check>| -> Result<()> {
        let mut failed = 0;
        let mut first = None;
        for _ in 0..cases {
            if let Err(e) = f(rng)? {
                failed += 1;
                first.get_or_insert(e);
            }
        }
        ok &= failed == 0;
        report.push(match first {
            None => format!("{name} {cases}/{cases}"),
            Some(e) => format!("{name} {}/{cases} (first failure: {e})", cases - failed),
        });
        Ok(())
    };
    sweep("moreau", &mut rng, &mut |r| {
        let d = r.gen_range(1..=4);
        let k = instances::cone(r, d);
        let v = instances::int_vec(r, d, -4, 4);
        Ok(moreau(&k, &v))
    })?;
    sweep("polar", &mut rng, &mut |r| {
        let d = r.gen_range(1..=4);
        Ok(polar_involution(&instances::cone(r, d)))
    })?;
    sweep("tangent/normal", &mut rng, &mut |r| {
        let d = r.gen_range(1..=3);
        let p = instances::polyhedron(r, d, &vec![0.0; d]);
        let x = instances::boundary_point(r, &p);
        Ok(tangent_normal_polarity(&p, &x))
    })?;
    sweep("interior", &mut rng, &mut |r| {
        if r.gen_bool(0.5) {
            let s = build_lcp(&instances::lcp_matrix(r, 2))?;
            let x = HPolyhedron::boxed(&[-1.0, -1.0], &[1.0, 1.0])?;
            Ok(interior_reduction(&s, &x, &[0.0, 0.0], &[0.0, 0.0]))
        } else {
            let inst = instances::linear_system(r)?;
            let big = HPolyhedron::boxed(&vec![-1e3; inst.dom.dim()], &vec![1e3; inst.dom.dim()])?;
            let x = inst.dom.intersect(&big)?;
            Ok(interior_reduction(&inst.s, &x, &inst.interior.0, &inst.interior.1))
        }
    })?;
    sweep("criterion equivalence", &mut rng, &mut |r| {
        if r.gen_bool(0.5) {
            let s = build_lcp(&instances::lcp_matrix(r, 2))?;
            let x = if r.gen_bool(0.5) {
                HPolyhedron::full(2)
            } else {
                HPolyhedron::inequalities(2, vec![instances::int_vec(r, 2, -2, 2)], vec![0.0])?
            };
            Ok(criterion_equivalence(&s, &x, &[0.0, 0.0], &[0.0, 0.0]))
        } else {
            let inst = instances::linear_system(r)?;
            let x = if r.gen_bool(0.5) { inst.dom.clone() } else { HPolyhedron::full(inst.dom.dim()) };
            Ok(criterion_equivalence(&inst.s, &x, &inst.boundary.0, &inst.boundary.1))
        }
    })?;
    sweep("epigraph normals", &mut rng, &mut |r| {
        let (f, x) = instances::pl_function(r)?;
        let lift = [0.5, 1.0, 2.0][r.gen_range(0..3)];
        Ok(epigraph_proximal_slice(&f, &x, lift))
    })?;
    sweep("modulus equality", &mut rng, &mut |r| {
        let (f, x) = instances::pl_function(r)?;
        let n = f.n;
        let xs = match r.gen_range(0..3) {
            0 => HPolyhedron::full(n),
            1 => {
                let a = instances::int_vec(r, n, -2, 2);
                let b = crate::linalg::dot(&a, &x);
                HPolyhedron::inequalities(n, vec![a], vec![b])?
            }
            _ => instances::polyhedron(r, n, &x),
        };
        Ok(modulus_equality(&f, &xs, &x))
    })?;
    sweep("outer ⊂ basic", &mut rng, &mut |r| {
        let (f, x) = instances::pl_function(r)?;
        let v = instances::int_vec(r, f.n, -3, 3);
        Ok(outer_inside_basic(&f, &x, &v))
    })?;
    Ok((ok, report.join(", ")))
}

fn sublinear_suite(count: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SampleConfig { seed: 11, radii: vec![1e-3], pairs_per_radius: 4000, ..SampleConfig::default() };
    let (mut with_lineality, mut unbounded_faces) = (0, 0);
    let mut failures = Vec::new();
    let mut worst: f64 = 1.0;
    for i in 0..count {
        let d = instances::support_set(&mut rng);
        let v = d.vrep().expect("nonempty");
        with_lineality += usize::from(!v.lineality.is_empty());
        let r = sublinear_analysis(&d)?;
        unbounded_faces += usize::from(r.pairs.iter().any(|p| !p.bounded));
        let pairs_ok = r.pairs.iter().all(|p| p.recession_matches);
        let h = PlFunction::support_of(&d)?;
        let dom = horizon_cone(&d).polar().as_polyhedron().clone();
        let sigma = FnBox::new(d.dim(), |y: &[f64]| h.value(y));
        let zero = vec![0.0; d.dim()];
        let est = estimate_function_modulus(&sigma, &dom, &zero, &cfg, None)?.estimate();
        let agree = if r.modulus == 0.0 { est <= 1e-9 } else { (est / r.modulus - 1.0).abs() <= 0.05 };
        if r.modulus > 0.0 {
            worst = worst.min(est / r.modulus);
        }
        if !(pairs_ok && r.modulus.is_finite() && agree) {
            failures.push(format!("#{i}: face pairs {pairs_ok}, modulus {}, estimate {est}", r.modulus));
        }
    }
    let ok = failures.is_empty() && with_lineality > 0 && unbounded_faces > 0;
    Ok((
        ok,
        format!(
            "{count} sets ({with_lineality} with lineality, {unbounded_faces} with unbounded faces), worst estimate/exact {worst:.4}{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    ))
}
