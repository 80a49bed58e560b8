use super::*;
use crate::stratified::{build_lcp, build_linear_system, stratify_union, UNION_BUDGET};

fn lcp() -> StratifiedMapping<f64> {
    build_lcp(&[vec![-1.0, 0.0], vec![1.0, 1.0]]).unwrap()
}

fn golden() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).sqrt()
}

/// Random nonnegative combinations of each piece's parameter generators, mapped to the graph.
fn sample_graph(h: &PhMap<f64>, per_piece: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    for piece in &h.pieces {
        let g = piece.param.generators();
        for _ in 0..per_piece {
            let mut y = vec![0.0; piece.param.dim()];
            for r in &g.rays {
                crate::linalg::axpy(rng.gen::<f64>(), r, &mut y);
            }
            for l in &g.lineality {
                crate::linalg::axpy(rng.gen_range(-1.0..1.0), l, &mut y);
            }
            out.push((piece.input(&y), piece.output(&y)));
        }
    }
    out
}

#[test]
fn identity_outer_norm_is_one() {
    let h = PhMap::<f64>::identity(3);
    assert!((outer_norm(&h).unwrap().value - 1.0).abs() < 1e-12);
}

#[test]
fn linear_outer_norm_is_spectral_norm() {
    // singular values of [[3, 0], [4, 5]] are 3√5 and √5
    let h = PhMap::linear(&[vec![3.0, 0.0], vec![4.0, 5.0]], 2);
    assert!((outer_norm(&h).unwrap().value - 45f64.sqrt()).abs() < 1e-9);
}

#[test]
fn classical_lcp_kernel_gives_infinite_norm() {
    let s = lcp();
    let d = coderivative(&s, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    let k = kernel_of(&d).expect("kernel is nontrivial");
    assert!(k[0] < 0.0 && k[1].abs() < 1e-9);
    let o = outer_norm(&d).unwrap();
    assert!(o.value.is_infinite());
    let (u, x) = o.witness.unwrap();
    assert!(u.iter().all(|v| *v == 0.0) && x[0] < 0.0);
    assert!(d.graph_contains(&[0.0, 0.0], &[-2.0, 0.0]));
    assert!(!d.graph_contains(&[0.0, 0.0], &[2.0, 0.0]));
}

#[test]
fn lcp_relative_modulus_and_kappa_table() {
    let s = lcp();
    let x = s.domain().unwrap().clone();
    let r = check_criterion(&s, &x, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    assert!(r.holds && r.kernel_witness.is_none());
    assert!((r.modulus - golden()).abs() < 1e-8, "{}", r.modulus);
    let one = ["({2},∅,{1})", "({1},{2},∅)", "({1},∅,{2})", "({2},{1},∅)"];
    assert_eq!(r.per_stratum.len(), 9);
    for k in &r.per_stratum {
        let want = if k.label == "({1,2},∅,∅)" {
            0.0
        } else if one.contains(&k.label.as_str()) {
            1.0
        } else {
            golden()
        };
        assert!((k.kappa - want).abs() < 1e-8, "{} {}", k.label, k.kappa);
    }
}

#[test]
fn interior_point_reduces_to_coderivative() {
    // q = (1, 0) lies in the interior of dom S; S(1, 0) = {(0, 0)}
    let s = lcp();
    let x = s.domain().unwrap().clone();
    let q = [1.0, 0.0];
    let u = [0.0, 0.0];
    let p = projectional_coderivative(&s, &x, &q, &u).unwrap();
    let d = coderivative(&s, &q, &u).unwrap();
    let pg = p.graph();
    let dg = d.graph();
    assert!(pg.pieces.iter().all(|a| dg.pieces.iter().any(|b| a.is_subset_of(b))));
    assert!(dg.pieces.iter().all(|a| pg.pieces.iter().any(|b| a.is_subset_of(b))));
}

#[test]
fn linear_system_criterion_holds_on_boundary() {
    let k = HPolyhedron::<f64>::orthant(2);
    let s = build_linear_system(&[vec![1.0], vec![-1.0]], &k).unwrap();
    let x = s.domain().unwrap().clone();
    // p = (0, 0): x = 0 is the only solution of x ≤ 0, -x ≤ 0
    let r = check_criterion(&s, &x, &[0.0, 0.0], &[0.0]).unwrap();
    assert!(r.holds);
    assert!(r.modulus.is_finite());
}

#[test]
fn linear_system_coderivative_is_adjoint_on_normal_cone() {
    let k = HPolyhedron::<f64>::orthant(1);
    let s = build_linear_system(&[vec![2.0]], &k).unwrap();
    // p + 2x ≥ 0 is active at p = -2, x = 1: pairs (u*, p*) = (-Aᵀy, y) with y ∈ N_K(0) = ℝ₋
    let d = coderivative(&s, &[-2.0], &[1.0]).unwrap();
    assert!(d.graph_contains(&[2.0], &[-1.0]));
    assert!(!d.graph_contains(&[-2.0], &[1.0]));
    assert!(!d.graph_contains(&[1.0], &[1.0]));
}

#[test]
fn necessity_and_sufficiency_checks() {
    let s = lcp();
    let x = s.domain().unwrap().clone();
    let z = [0.0, 0.0];
    let pass = neighborhood_necessity_check(&s, &x, &z, &z, 1.7, 0.1, 400, 7).unwrap();
    assert!(pass.passed());
    let pass = neighborhood_sufficiency_check(&s, &x, &z, &z, 1.7, 0.1, 400, 7).unwrap();
    assert!(pass.passed());
    match neighborhood_necessity_check(&s, &x, &z, &z, 1.0, 0.1, 400, 7).unwrap() {
        CheckOutcome::Witness(v) => {
            assert!(v.ratio > 1.0 + 1e-6);
            let un = crate::linalg::norm(&v.ustar);
            let lhs = crate::linalg::dot(&v.xstar, &v.w);
            assert!(lhs > un * (1.0 + 1e-6), "{lhs} {un}");
        }
        CheckOutcome::Pass { .. } => panic!("κ = 1 must be violated"),
    }
    assert!(!neighborhood_sufficiency_check(&s, &x, &z, &z, 1.0, 0.1, 400, 7).unwrap().passed());
}

#[test]
fn checks_are_reproducible() {
    let s = lcp();
    let x = s.domain().unwrap().clone();
    let z = [0.0, 0.0];
    let a = neighborhood_necessity_check(&s, &x, &z, &z, 1.0, 0.01, 50, 99).unwrap();
    let b = neighborhood_necessity_check(&s, &x, &z, &z, 1.0, 0.01, 50, 99).unwrap();
    match (a, b) {
        (CheckOutcome::Witness(a), CheckOutcome::Witness(b)) => {
            assert_eq!(a.x, b.x);
            assert_eq!(a.u, b.u);
            assert_eq!(a.xstar, b.xstar);
        }
        _ => panic!("expected witnesses"),
    }
}

#[test]
fn directional_check_fails_on_lcp() {
    let s = lcp();
    let x = s.domain().unwrap().clone();
    let z = [0.0, 0.0];
    let r = directional_sufficiency_check(&s, &x, &z, &z).unwrap();
    assert!(r.condition_i);
    assert!(!r.passed());
    let f = r
        .failing
        .iter()
        .find(|f| f.x == vec![0.0, -1.0] && f.u == vec![0.0, 1.0])
        .map(|f| f.x.clone())
        .map(|_| ());
    assert!(f.is_some(), "{:?}", r.failing.iter().map(|f| (&f.x, &f.u)).collect::<Vec<_>>());
    let f = r.failing.iter().find(|f| f.x == vec![0.0, -1.0] && f.u == vec![0.0, 1.0]).unwrap();
    assert!(f.kernel.contains(&[-1.0, 0.0]));
    assert!(!f.kernel.contains(&[1.0, 0.0]) && !f.kernel.contains(&[0.0, 1.0]) && !f.kernel.contains(&[0.0, -1.0]));
    let d = directional_coderivative(&s, &z, &z, &[0.0, -1.0], &[0.0, 1.0]).unwrap();
    assert!(d.graph_contains(&[0.0, 0.0], &[-1.0, 0.0]));
}

#[test]
fn directional_cone_along_stratum_matches_limiting_cone() {
    let s = lcp();
    for st in &s.strata {
        let p = st.point();
        let (dx, du) = (&p[..2], &p[2..]);
        let a = directional_coderivative(&s, &[0.0, 0.0], &[0.0, 0.0], dx, du).unwrap();
        let b = coderivative(&s, dx, du).unwrap();
        let (ga, gb) = (a.graph(), b.graph());
        assert!(ga.pieces.iter().all(|k| gb.pieces.iter().any(|l| k.is_subset_of(l))), "{}", st.label);
        assert!(gb.pieces.iter().all(|k| ga.pieces.iter().any(|l| k.is_subset_of(l))), "{}", st.label);
    }
}

#[test]
fn directional_check_passes_for_linear_map() {
    // u = 2x on ℝ, graph is a line
    let line = HPolyhedron::new(2, vec![], vec![], vec![vec![2.0, -1.0]], vec![0.0]).unwrap();
    let s = stratify_union(1, &[line], UNION_BUDGET).unwrap();
    let r = directional_sufficiency_check(&s, &HPolyhedron::full(1), &[0.5], &[1.0]).unwrap();
    assert!(r.passed());
}

#[test]
fn smooth_affine_and_halfspace() {
    let j = vec![vec![1.0, 2.0], vec![0.0, 1.0]];
    let none = SmoothSet::Affine { b_rows: vec![], b: vec![] };
    let h = smooth_projectional_coderivative(&j, &none, &[0.0, 0.0]).unwrap();
    // Jᵀ y for y = (1, 1) is (1, 3)
    assert!(h.graph_contains(&[1.0, 1.0], &[1.0, 3.0]));
    let line = SmoothSet::Affine { b_rows: vec![vec![1.0, 0.0]], b: vec![1.0] };
    assert_eq!(smooth_projectional_value(&j, &line, &[1.0, 0.0], &[1.0, 1.0]).unwrap(), SmoothValue::Point(vec![0.0, 3.0]));
    assert!(smooth_projectional_value(&j, &line, &[0.0, 0.0], &[1.0, 1.0]).is_err());

    let half = SmoothSet::Halfspace { a: vec![1.0, 0.0], beta: 0.0 };
    match smooth_projectional_value(&j, &half, &[0.0, 5.0], &[1.0, 0.0]).unwrap() {
        SmoothValue::TwoPoints(a, b) => {
            assert_eq!(a, vec![1.0, 2.0]);
            assert_eq!(b, vec![0.0, 2.0]);
        }
        v => panic!("{v:?}"),
    }
    // Jᵀ(0, 1) = (0, 1) has zero first coordinate
    assert_eq!(smooth_projectional_value(&j, &half, &[0.0, 0.0], &[0.0, 1.0]).unwrap(), SmoothValue::Point(vec![0.0, 1.0]));
    assert!(matches!(smooth_projectional_value(&j, &half, &[0.0, 0.0], &[-1.0, 0.0]).unwrap(), SmoothValue::Segment(..)));
    assert!(smooth_projectional_value(&j, &half, &[-1.0, 0.0], &[1.0, 0.0]).is_err());

    let h = smooth_projectional_coderivative(&j, &half, &[0.0, 0.0]).unwrap();
    // positive side: both endpoints, nothing between
    assert!(h.graph_contains(&[1.0, 0.0], &[1.0, 2.0]));
    assert!(h.graph_contains(&[1.0, 0.0], &[0.0, 2.0]));
    assert!(!h.graph_contains(&[1.0, 0.0], &[0.5, 2.0]));
    // negative side: the whole segment
    assert!(h.graph_contains(&[-1.0, 0.0], &[-0.5, -2.0]));
    assert!(!h.graph_contains(&[-1.0, 0.0], &[0.5, -2.0]));
}

#[test]
fn smooth_halfspace_matches_generic_engine() {
    // u = J x with J = [[1, 2], [0, 1]] relative to {x₁ ≤ 0} at the origin
    let graph = HPolyhedron::<f64>::new(
        4,
        vec![],
        vec![],
        vec![vec![1.0, 2.0, -1.0, 0.0], vec![0.0, 1.0, 0.0, -1.0]],
        vec![0.0, 0.0],
    )
    .unwrap();
    let s = stratify_union(2, &[graph], UNION_BUDGET).unwrap();
    let x = HPolyhedron::<f64>::inequalities(2, vec![vec![1.0, 0.0]], vec![0.0]).unwrap();
    let generic = projectional_coderivative(&s, &x, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    let j = vec![vec![1.0, 2.0], vec![0.0, 1.0]];
    let closed = smooth_projectional_coderivative(&j, &SmoothSet::Halfspace { a: vec![1.0, 0.0], beta: 0.0 }, &[0.0, 0.0]).unwrap();
    // the two piece decompositions differ, so compare the unions on sampled graph points
    for (u, xs) in sample_graph(&generic, 40, 1) {
        assert!(closed.graph_contains(&u, &xs), "{u:?} {xs:?}");
    }
    for (u, xs) in sample_graph(&closed, 40, 2) {
        assert!(generic.graph_contains(&u, &xs), "{u:?} {xs:?}");
    }
    assert!((outer_norm(&generic).unwrap().value - outer_norm(&closed).unwrap().value).abs() < 1e-9);
}

#[test]
fn phmap_evaluate_and_inverse() {
    let s = lcp();
    let d = coderivative(&s, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
    let vals = d.evaluate(&[0.0, 0.0]).unwrap();
    assert!(vals.iter().any(|v| !v.rays.is_empty()));
    let inv = d.inverse();
    assert!(inv.graph_contains(&[-2.0, 0.0], &[0.0, 0.0]));
    assert!(d.evaluate(&[0.0]).is_err());
}
