use super::*;
use crate::functions::{level_set_mapping, PlFunction};
use crate::geometry::{normal_cone_convex, HPolyhedron};
use crate::stratified::build_lcp;

fn golden() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).sqrt()
}

fn cfg(pairs: usize) -> SampleConfig {
    SampleConfig { seed: 7, pairs_per_radius: pairs, ..SampleConfig::default() }
}

fn lcp() -> crate::stratified::StratifiedMapping<f64> {
    build_lcp(&[vec![-1.0, 0.0], vec![1.0, 1.0]]).unwrap()
}

fn lcp_domain() -> HPolyhedron<f64> {
    HPolyhedron::inequalities(2, vec![vec![-1.0, 0.0]], vec![0.0]).unwrap()
}

#[test]
fn config_validation() {
    assert!(SampleConfig::default().validate().is_ok());
    let bad = SampleConfig { radii: vec![1e-2, 1e-1], ..SampleConfig::default() };
    assert!(matches!(bad.validate(), Err(crate::Error::Schema(_))));
    let bad = SampleConfig { pairs_per_radius: 0, ..SampleConfig::default() };
    assert!(bad.validate().is_err());
    let bad = SampleConfig { radii: vec![0.0], ..SampleConfig::default() };
    assert!(bad.validate().is_err());
    let parsed: SampleConfig = serde_json::from_str(r#"{"seed": 3}"#).unwrap();
    assert_eq!(parsed.seed, 3);
    assert_eq!(parsed.radii, vec![1e-1, 1e-2, 1e-3]);
    assert!(serde_json::from_str::<SampleConfig>(r#"{"sed": 3}"#).is_err());
}

#[test]
fn constant_mapping_has_zero_modulus() {
    let s = FnMap { n: 2, m: 1, f: |_: &[f64]| Ok(SetValue::Cloud(vec![vec![0.0]])) };
    let r = estimate_modulus(&s, &HPolyhedron::full(2), &[0.0, 0.0], &[0.0], &cfg(200), None).unwrap();
    assert!(r.lower_bounds.iter().all(|b| b.ratio == 0.0));
    assert_eq!(r.trend, Trend::Stable);
}

#[test]
fn lcp_estimate_approaches_the_exact_modulus() {
    let r = estimate_modulus(&lcp(), &lcp_domain(), &[0.0, 0.0], &[0.0, 0.0], &cfg(2000), None).unwrap();
    let est = r.estimate();
    assert!(est <= golden() * (1.0 + 1e-9), "{est}");
    assert!(est >= golden() * 0.98, "{est}");
    assert!(r.lower_bounds.iter().all(|b| b.ratio <= golden() * (1.0 + 1e-9)));
}

#[test]
fn level_set_estimate_is_one() {
    let f = PlFunction::max_affine(&[(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap();
    let s = level_set_mapping(&f, &[0.0], &[0.0]).unwrap();
    let half_line = HPolyhedron::inequalities(1, vec![vec![-1.0]], vec![0.0]).unwrap();
    let r = estimate_modulus(&s, &half_line, &[0.0], &[0.0], &cfg(1000), None).unwrap();
    assert!((r.estimate() - 1.0f64).abs() <= 0.02, "{}", r.estimate());
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| estimate_modulus(&lcp(), &lcp_domain(), &[0.0, 0.0], &[0.0, 0.0], &cfg(300), Some(1.0)).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.lower_bounds, b.lower_bounds);
    assert_eq!(a.witness, b.witness);
    assert_eq!(a.verdict, b.verdict);
}

#[test]
fn falsifying_witness_replays() {
    let r = estimate_modulus(&lcp(), &lcp_domain(), &[0.0, 0.0], &[0.0, 0.0], &cfg(500), Some(1.0)).unwrap();
    assert_eq!(r.verdict, Some(Verdict::Falsifies(1.0)));
    let w = r.witness.unwrap();
    let replay = replay_witness(&lcp(), &lcp_domain(), &[0.0, 0.0], &[0.0, 0.0], &w).unwrap();
    assert!(replay.valid && replay.violates);
    assert_eq!(replay.ratio, w.ratio);
    let ok = estimate_modulus(&lcp(), &lcp_domain(), &[0.0, 0.0], &[0.0, 0.0], &cfg(200), Some(1.7)).unwrap();
    assert_eq!(ok.verdict, Some(Verdict::ConsistentWith(1.7)));
}

#[test]
fn proximal_normals_at_a_vertex_lie_in_the_normal_cone() {
    let g = HPolyhedron::inequalities(2, vec![vec![1.0, 2.0], vec![1.0, -1.0], vec![-1.0, 0.0]], vec![2.0, 0.5, 1.0]).unwrap();
    let x = [1.0, 0.5];
    let n = normal_cone_convex(&g, &x).unwrap();
    let pieces = [g];
    let c = SampleConfig { radii: vec![1e-2], pairs_per_radius: 500, ..cfg(0) };
    let v = sample_proximal_normals(&ProximalTarget::Pieces(&pieces), &x, &c).unwrap();
    assert!(!v.is_empty());
    assert!(v.iter().all(|d| n.contains(d)));
}

#[test]
fn proximal_normals_of_the_absolute_value_epigraph() {
    // epi |x| at the origin: N = {(v, λ) : λ ≤ -|v|}
    let epi = HPolyhedron::inequalities(2, vec![vec![1.0, -1.0], vec![-1.0, -1.0]], vec![0.0, 0.0]).unwrap();
    let c = SampleConfig { radii: vec![1e-2], pairs_per_radius: 400, set_discretization: 24, ..cfg(0) };
    let exact = sample_proximal_normals(&ProximalTarget::Pieces(std::slice::from_ref(&epi)), &[0.0, 0.0], &c).unwrap();
    assert!(!exact.is_empty());
    assert!(exact.iter().all(|d| d[1] <= -f64::abs(d[0]) + 1e-9));
    let member = |z: &[f64]| z[1] >= z[0].abs();
    let grid = sample_proximal_normals(&ProximalTarget::Membership { dim: 2, member: &member }, &[0.0, 0.0], &c).unwrap();
    assert!(exact.iter().all(|d| grid.contains(d)));
    // distance of a unit vector to the cone is at most sin((2√2 / 24)^½)
    assert!(grid.iter().all(|d| (f64::abs(d[0]) + d[1]).max(0.0) / 2f64.sqrt() <= 0.34f64.sin() + 1e-9), "{grid:?}");
    let inside = sample_proximal_normals(&ProximalTarget::Pieces(std::slice::from_ref(&epi)), &[0.0, 1.0], &c).unwrap();
    assert!(inside.is_empty());
}

#[test]
fn disk_example_modulus() {
    let (h, dom) = disk_example::<f64>();
    let r = estimate_function_modulus(&h, &dom, &[0.0, 0.0], &cfg(2000), None).unwrap();
    let est = r.estimate();
    assert!(est <= 2f64.sqrt() + 1e-9 && est >= 2f64.sqrt() * 0.98, "{est}");
}

#[test]
fn hyperbola_example_is_not_lipschitz() {
    let (h, dom) = hyperbola_example::<f64>();
    let pairs: Vec<(Vec<f64>, Vec<f64>)> =
        (1..=6).map(|j| 10f64.powi(j)).map(|k| (vec![0.0, -1.0 / k], vec![-1.0 / (k * k), -1.0 / k])).collect();
    let ratios = ratio_along_pairs(&h, &pairs);
    for (j, q) in ratios.iter().enumerate() {
        let k = 10f64.powi(j as i32 + 1);
        // |h(x_k) - h(x'_k)| / ‖x_k - x'_k‖ = √(2/k³) · k² = √(2k)
        assert!((q - (2.0 * k).sqrt()).abs() <= 1e-6 * (2.0 * k).sqrt(), "{q}");
    }
    assert_eq!(trend_along(&ratios), Trend::Unbounded);
    let r = estimate_function_modulus(&h, &dom, &[0.0, 0.0], &cfg(500), None).unwrap();
    assert!(r.estimate() > 10.0);
}

#[test]
fn sequence_trends() {
    let saturating: Vec<f64> = (1..=50).map(|k| 2.0 - 1.0 / k as f64).collect();
    assert_ne!(trend_along(&saturating), Trend::Unbounded);
    assert_eq!(trend_along(&[1.0, 1.0, 1.0]), Trend::Stable);
    assert_eq!(trend_along(&[3.0, 2.0, 1.0]), Trend::Decreasing);
    assert_eq!(trend_along(&[1.0, f64::INFINITY]), Trend::Unbounded);
}

#[test]
fn affine_function_gives_gradient_norm() {
    let h = FnBox::new(2, |x: &[f64]| 3.0 * x[0] - 4.0 * x[1] + 1.0);
    let r = estimate_function_modulus(&h, &HPolyhedron::full(2), &[1.0, 1.0], &cfg(500), None).unwrap();
    assert!(r.lower_bounds.iter().all(|b| b.ratio <= 5.0 + 1e-9 && b.ratio > 4.9));
}

#[test]
fn leaving_the_domain_is_reported() {
    let (h, _) = disk_example::<f64>();
    let r = estimate_function_modulus(&h, &HPolyhedron::full(2), &[0.0, 0.0], &cfg(50), None).unwrap();
    assert!(r.estimate().is_infinite());
    assert!(r.witness.unwrap().outside_domain);
}

