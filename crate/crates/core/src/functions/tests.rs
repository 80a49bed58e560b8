use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::HPolyhedron;

fn abs1() -> PlFunction<f64> {
    PlFunction::max_affine(&[(vec![1.0], 0.0), (vec![-1.0], 0.0)]).unwrap()
}

fn interval(pieces: &[HPolyhedron<f64>]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = pieces
        .iter()
        .map(|p| {
            let v = p.vrep().unwrap();
            let lo = v.vertices.iter().map(|w| w[0]).fold(f64::INFINITY, f64::min);
            let hi = v.vertices.iter().map(|w| w[0]).fold(f64::NEG_INFINITY, f64::max);
            assert!(v.rays.is_empty() && v.lineality.is_empty());
            (lo, hi)
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn half_line(lo: f64) -> HPolyhedron<f64> {
    HPolyhedron::inequalities(1, vec![vec![-1.0]], vec![-lo]).unwrap()
}

/// Largest difference quotient over random pairs in `X ∩ [-r, r]ⁿ` around `x̄`.
fn sampled_lip(f: &PlFunction<f64>, x_set: &HPolyhedron<f64>, x: &[f64], r: f64, pairs: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut best: f64 = 0.0;
    let draw = |rng: &mut ChaCha8Rng| loop {
        let p: Vec<f64> = x.iter().map(|c| c + rng.gen_range(-r..r)).collect();
        if x_set.contains(&p) {
            return p;
        }
    };
    for _ in 0..pairs {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let d = crate::linalg::dist(&a, &b);
        if d > 1e-12 {
            best = best.max((f.value(&a) - f.value(&b)).abs() / d);
        }
    }
    best
}

#[test]
fn overlapping_cells_must_agree() {
    let c1 = PlCell { set: half_line(0.0), g: vec![1.0], c: 0.0 };
    let c2 = PlCell { set: HPolyhedron::full(1), g: vec![2.0], c: 0.0 };
    assert!(matches!(PlFunction::new(1, vec![c1, c2]), Err(crate::Error::Schema(_))));
}

#[test]
fn values_and_domain() {
    let f = abs1();
    assert_eq!(f.value(&[-3.0]), 3.0);
    let g = PlFunction::new(1, vec![PlCell { set: half_line(0.0), g: vec![1.0], c: 0.0 }]).unwrap();
    assert!(g.value(&[-1.0]).is_infinite());
    assert!(matches!(subdifferentials(&g, &[-1.0]), Err(crate::Error::Domain(_))));
}

#[test]
fn absolute_value_subgradients() {
    let (basic, horizon) = subdifferentials(&abs1(), &[0.0]).unwrap();
    assert_eq!(interval(&basic).len(), 1);
    let (lo, hi) = interval(&basic)[0];
    assert!((lo + 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
    assert!(horizon.is_zero());
}

#[test]
fn affine_subgradient_is_the_gradient() {
    let f = PlFunction::affine(vec![2.0, -1.0], 3.0);
    let (basic, horizon) = subdifferentials(&f, &[1.0, 1.0]).unwrap();
    assert_eq!(basic.len(), 1);
    let v = basic[0].vrep().unwrap();
    assert_eq!(v.vertices.len(), 1);
    assert!(crate::linalg::dist(&v.vertices[0], &[2.0, -1.0]) < 1e-9);
    assert!(horizon.is_zero());
}

#[test]
fn max_of_two_lines_matches_one_sided_derivatives() {
    let f = PlFunction::max_affine(&[(vec![1.0], 0.0), (vec![2.0], 0.0)]).unwrap();
    // oracle: difference quotients on both sides of 0 and at nearby points
    let h = 1e-6;
    let left = (f.value(&[0.0]) - f.value(&[-h])) / h;
    let right = (f.value(&[h]) - f.value(&[0.0])) / h;
    let mut expected = [(left, right)];
    for x in [-1e-3, 1e-3] {
        let d = (f.value(&[x + h]) - f.value(&[x - h])) / (2.0 * h);
        assert!(d >= left - 1e-6 && d <= right + 1e-6);
    }
    expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (basic, horizon) = subdifferentials(&f, &[0.0]).unwrap();
    let got = interval(&basic);
    assert_eq!(got.len(), 1);
    assert!((got[0].0 - expected[0].0).abs() < 1e-6 && (got[0].1 - expected[0].1).abs() < 1e-6);
    assert!((got[0].0 - 1.0).abs() < 1e-9 && (got[0].1 - 2.0).abs() < 1e-9);
    assert!(horizon.is_zero());
}

#[test]
fn interior_points_reduce_to_ordinary_subgradients() {
    let f = PlFunction::max_affine(&[(vec![1.0, 0.0], 0.0), (vec![-1.0, 2.0], 0.0), (vec![0.0, -1.0], 0.0)]).unwrap();
    let x_set = HPolyhedron::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
    let (basic, h0) = subdifferentials(&f, &[0.0, 0.0]).unwrap();
    let (proj, h1) = projectional_subdifferentials(&f, &x_set, &[0.0, 0.0]).unwrap();
    assert!(h0.is_zero() && h1.is_zero());
    let inside = |a: &[HPolyhedron<f64>], b: &[HPolyhedron<f64>]| a.iter().all(|p| b.iter().any(|q| contains_poly(q, p)));
    assert!(inside(&basic, &proj) && inside(&proj, &basic));
}

#[test]
fn absolute_value_is_one_lipschitz() {
    let r = relative_lip_modulus(&abs1(), &HPolyhedron::full(1), &[0.0]).unwrap();
    assert!((r.modulus - 1.0).abs() < 1e-9);
    assert!((r.profile_modulus - 1.0).abs() < 1e-9);
    assert!(r.horizon_trivial);
}

#[test]
fn steep_cell_outside_x_is_ignored() {
    let f = PlFunction::new(
        1,
        vec![
            PlCell { set: HPolyhedron::inequalities(1, vec![vec![1.0]], vec![0.0]).unwrap(), g: vec![-1.0], c: 0.0 },
            PlCell { set: half_line(0.0), g: vec![10.0], c: 0.0 },
        ],
    )
    .unwrap();
    let x_set = HPolyhedron::inequalities(1, vec![vec![1.0]], vec![0.0]).unwrap();
    let r = relative_lip_modulus(&f, &x_set, &[0.0]).unwrap();
    let sampled = sampled_lip(&f, &x_set, &[0.0], 1e-2, 2000);
    assert!((r.modulus - 1.0).abs() < 1e-9);
    assert!((sampled - r.modulus).abs() < 1e-6);
    let full = relative_lip_modulus(&f, &HPolyhedron::full(1), &[0.0]).unwrap();
    assert!((full.modulus - 10.0).abs() < 1e-9);
}

#[test]
fn boundary_point_of_a_half_plane() {
    // f = x₁ + 3x₂ on X = {x₂ ≤ 0}: points inside X see the whole gradient
    let f = PlFunction::affine(vec![1.0, 3.0], 0.0);
    let x_set = HPolyhedron::inequalities(2, vec![vec![0.0, 1.0]], vec![0.0]).unwrap();
    let r = relative_lip_modulus(&f, &x_set, &[0.0, 0.0]).unwrap();
    assert!((r.modulus - 10f64.sqrt()).abs() < 1e-9);
    let line = HPolyhedron::new(2, vec![], vec![], vec![vec![0.0, 1.0]], vec![0.0]).unwrap();
    let r = relative_lip_modulus(&f, &line, &[0.0, 0.0]).unwrap();
    assert!((r.modulus - 1.0).abs() < 1e-9);
    let sampled = sampled_lip(&f, &x_set, &[0.0, 0.0], 1e-2, 4000);
    assert!(sampled <= 10f64.sqrt() + 1e-9 && sampled > 0.95 * 10f64.sqrt());
}

#[test]
fn x_leaving_the_domain_gives_infinite_modulus() {
    // f = x on [0, ∞) and X = ℝ: f = +∞ at points of X left of 0
    let f = PlFunction::new(1, vec![PlCell { set: half_line(0.0), g: vec![1.0], c: 0.0 }]).unwrap();
    let r = relative_lip_modulus(&f, &HPolyhedron::full(1), &[0.0]).unwrap();
    assert!(r.modulus.is_infinite() && r.profile_modulus.is_infinite());
    assert!(!r.horizon_trivial);
    let inside = relative_lip_modulus(&f, &half_line(0.0), &[0.0]).unwrap();
    assert!((inside.modulus - 1.0).abs() < 1e-9);
}

fn level(v: f64) -> LevelSetReport<f64> {
    level_set_analysis(&abs1(), &[0.0], &[v]).unwrap()
}

#[test]
fn absolute_value_outer_limiting_sets() {
    let pts = |v: f64| {
        let o = outer_limiting_subdifferential(&abs1(), &[0.0], &[v]).unwrap();
        interval(&o).iter().map(|(a, b)| {
            assert!((a - b).abs() < 1e-12);
            *a
        }).collect::<Vec<f64>>()
    };
    for v in [-0.5, 0.0, 0.5] {
        let p = pts(v);
        assert_eq!(p.len(), 2);
        assert!((p[0] + 1.0).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
    }
    for v in [1.0, 2.0] {
        let p = pts(v);
        assert!(p.len() == 1 && (p[0] + 1.0).abs() < 1e-12);
    }
    for v in [-1.0, -2.0] {
        let p = pts(v);
        assert!(p.len() == 1 && (p[0] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn absolute_value_level_set_table() {
    let relative = |v: f64| {
        if v > -1.0 && v < 1.0 {
            1.0 / (1.0 - v).min(1.0 + v)
        } else if v >= 1.0 {
            1.0 / (1.0 + v)
        } else {
            1.0 / (1.0 - v)
        }
    };
    let classical = |v: f64| {
        if (-1.0..=1.0).contains(&v) {
            f64::INFINITY
        } else if v > 1.0 {
            1.0 / (v - 1.0)
        } else {
            1.0 / (-1.0 - v)
        }
    };
    for v in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        let r = level(v);
        assert!((r.lip_x - relative(v)).abs() < 1e-12, "v = {v}: {}", r.lip_x);
        assert!((r.coderivative_lip_x - relative(v)).abs() < 1e-9, "v = {v}: {}", r.coderivative_lip_x);
        let c = classical(v);
        assert!(if c.is_infinite() { r.classical_lip.is_infinite() } else { (r.classical_lip - c).abs() < 1e-12 }, "v = {v}");
        assert!(r.relative_llp);
        assert!(r.lip_x < r.classical_lip);
    }
}

#[test]
fn outer_limiting_set_of_a_single_cell() {
    // f = ⟨g, x⟩: the minorant is strict near x̄ iff v̄ ≠ g
    let f = PlFunction::<f64>::affine(vec![1.0, 2.0], 0.0);
    let o = outer_limiting_subdifferential(&f, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    assert_eq!(o.len(), 1);
    assert!(o[0].contains(&[1.0, 2.0]));
    let o = outer_limiting_subdifferential(&f, &[0.0, 0.0], &[1.0, 2.0]).unwrap();
    assert!(o.is_empty());
    let r = level_set_analysis(&f, &[0.0, 0.0], &[1.0, 2.0]).unwrap();
    assert_eq!(r.lip_x, 0.0);
    assert!(r.classical_lip.is_infinite());
}

#[test]
fn unit_box_support_function() {
    for n in 1..=3 {
        let d = HPolyhedron::boxed(&vec![-1.0; n], &vec![1.0; n]).unwrap();
        let s = sublinear_analysis(&d).unwrap();
        let expected = (n as f64).sqrt();
        assert!((s.modulus - expected).abs() < 1e-9);
        assert!((s.subgradient_norm - expected).abs() < 1e-9);
        assert!(s.pairs.iter().all(|p| p.recession_matches && p.bounded));
        let h = PlFunction::support_of(&d).unwrap();
        let r = relative_lip_modulus(&h, &HPolyhedron::full(n), &vec![0.0; n]).unwrap();
        assert!((r.modulus - expected).abs() < 1e-9);
        let sampled = sampled_lip(&h, &HPolyhedron::full(n), &vec![0.0; n], 1.0, 4000);
        assert!(sampled <= expected + 1e-9 && sampled > 0.8 * expected);
    }
}

#[test]
fn singleton_support_function_is_linear() {
    let d = HPolyhedron::<f64>::point(&[3.0, -4.0]);
    let s = sublinear_analysis(&d).unwrap();
    assert!((s.modulus - 5.0).abs() < 1e-9);
    assert_eq!(s.subgradients.len(), 1);
    let v = s.subgradients[0].vrep().unwrap();
    assert!(v.vertices.len() == 1 && crate::linalg::dist(&v.vertices[0], &[3.0, -4.0]) < 1e-9);
}

#[test]
fn strip_with_lineality() {
    // D = [-1, 1] × ℝ, h(x) = |x₁| on x₂ = 0
    let d = HPolyhedron::<f64>::inequalities(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![1.0, 1.0]).unwrap();
    let s = sublinear_analysis(&d).unwrap();
    assert!((s.modulus - 1.0).abs() < 1e-9);
    assert!(s.pairs.iter().all(|p| p.recession_matches));
    assert!(s.subgradient_norm.is_finite());
}

#[test]
fn unbounded_wedge_matches_the_function_route() {
    // D = {v₂ ≥ |v₁| - 1}: h(x) = -x₂ on dom h = {x₂ ≤ -|x₁|}
    let d = HPolyhedron::<f64>::inequalities(2, vec![vec![1.0, -1.0], vec![-1.0, -1.0]], vec![1.0, 1.0]).unwrap();
    let s = sublinear_analysis(&d).unwrap();
    assert!((s.modulus - 1.0).abs() < 1e-9, "{}", s.modulus);
    assert!((s.subgradient_norm - 1.0).abs() < 1e-9);
    assert!(s.pairs.iter().all(|p| p.recession_matches));
    assert!(!s.bounded_faces.is_empty());
    let h = PlFunction::support_of(&d).unwrap();
    let dom = crate::geometry::horizon_cone(&d).polar().as_polyhedron().clone();
    let r = relative_lip_modulus(&h, &dom, &[0.0, 0.0]).unwrap();
    assert!((r.modulus - s.modulus).abs() < 1e-9);
    for b in &s.bounded_faces {
        let v = b.vrep().unwrap();
        assert!(v.vertices.iter().all(|w| s.subgradients.iter().any(|p| p.contains(w))));
    }
}
