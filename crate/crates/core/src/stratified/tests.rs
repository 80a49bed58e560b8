use super::*;
use crate::geometry::PolyCone;

fn example_m() -> Vec<Vec<f64>> {
    vec![vec![-1.0, 0.0], vec![1.0, 1.0]]
}

#[test]
fn lcp_has_nine_strata_and_half_plane_domain() {
    let s = build_lcp(&example_m()).unwrap();
    assert_eq!(s.strata.len(), 9);
    let dom = s.domain().expect("domain is convex");
    assert!(dom.contains(&[0.0, -5.0]) && dom.contains(&[2.0, 3.0]));
    assert!(!dom.contains(&[-0.1, 0.0]));
    let origin = [0.0; 4];
    let k = s.stratum_of(&origin).unwrap();
    assert_eq!(s.strata[k].label, "(∅,∅,{1,2})");
}

#[test]
fn lcp_classical_kernel_at_origin() {
    let s = build_lcp(&example_m()).unwrap();
    let n = s.limiting_normal_cone(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
    // (q*, 0) ∈ N exactly for q* ∈ ℝ₋ × {0}
    assert!(n.contains(&[-1.0, 0.0, 0.0, 0.0]));
    assert!(!n.contains(&[1.0, 0.0, 0.0, 0.0]));
    assert!(!n.contains(&[0.0, 1.0, 0.0, 0.0]));
    assert!(!n.contains(&[0.0, -1.0, 0.0, 0.0]));
}

#[test]
fn scalar_lcp_strata() {
    let s = build_lcp(&[vec![1.0]]).unwrap();
    let mut labels: Vec<_> = s.strata.iter().map(|t| t.label.clone()).collect();
    labels.sort();
    assert_eq!(labels, vec!["({1},∅,∅)", "(∅,{1},∅)", "(∅,∅,{1})"]);
    // x = 0, q = 1 and x = 2, q = -2 are on the graph; x = 1, q = 1 is not
    assert!(s.graph_contains(&[1.0, 0.0]) && s.graph_contains(&[-2.0, 2.0]));
    assert!(!s.graph_contains(&[1.0, 1.0]));
}

#[test]
fn union_builder_matches_lcp_builder() {
    let lcp = build_lcp(&example_m()).unwrap();
    let uni = stratify_union(2, lcp.pieces(), UNION_BUDGET).unwrap();
    assert_eq!(uni.strata.len(), lcp.strata.len());
    for st in &lcp.strata {
        let z = st.point();
        let a = lcp.limiting_normal_at(z);
        let b = uni.limiting_normal_at(z);
        assert!(a.pieces.iter().all(|p| b.pieces.iter().any(|q| p.is_subset_of(q))), "{}", st.label);
        assert!(b.pieces.iter().all(|p| a.pieces.iter().any(|q| p.is_subset_of(q))), "{}", st.label);
    }
    let z = [0.0; 4];
    let a = lcp.limiting_normal_at(&z);
    let b = uni.limiting_normal_at(&z);
    assert!(a.pieces.iter().all(|p| b.pieces.iter().any(|q| p.is_subset_of(q))));
    assert!(b.pieces.iter().all(|p| a.pieces.iter().any(|q| p.is_subset_of(q))));
}

#[test]
fn two_axes_normal_cone() {
    let ax1 = HPolyhedron::new(2, vec![], vec![], vec![vec![0.0, 1.0]], vec![0.0]).unwrap();
    let ax2 = HPolyhedron::new(2, vec![], vec![], vec![vec![1.0, 0.0]], vec![0.0]).unwrap();
    let s = stratify_union(1, &[ax1, ax2], UNION_BUDGET).unwrap();
    assert_eq!(s.strata.len(), 5);
    let n = s.limiting_normal_cone(&[0.0], &[0.0]).unwrap();
    assert!(n.contains(&[1.0, 0.0]) && n.contains(&[0.0, -3.0]));
    assert!(!n.contains(&[-1.0, -1.0]));
}

#[test]
fn linear_system_domain_and_normals() {
    let k = HPolyhedron::<f64>::orthant(2);
    let s = build_linear_system(&[vec![1.0], vec![0.0]], &k).unwrap();
    assert_eq!(s.strata.len(), 4);
    let dom = s.domain().unwrap();
    assert!(dom.contains(&[-7.0, 0.0]) && dom.contains(&[3.0, 1.0]));
    assert!(!dom.contains(&[0.0, -0.5]));
    // at p = 0, x = 0: N = {(y, Aᵀy) : y ≤ 0}
    let n = s.limiting_normal_cone(&[0.0, 0.0], &[0.0]).unwrap();
    assert!(n.contains(&[-1.0, -2.0, -1.0]));
    assert!(!n.contains(&[-1.0, 0.0, 0.0]));
    let free = build_linear_system(&[vec![1.0, 2.0]], &HPolyhedron::full(1)).unwrap();
    assert_eq!(free.strata.len(), 1);
    assert!(free.strata[0].normals.is_zero());
}

#[test]
fn refinement_by_domain() {
    let s = build_lcp(&example_m()).unwrap();
    let x = s.domain().unwrap().clone();
    let r = s.refine(&x).unwrap();
    // every stratum meets the boundary face q₁ = 0 or the interior, some both
    assert!(r.cells.len() >= 9);
    let adj = r.adjacent(&[0.0; 4]);
    assert_eq!(adj.len(), r.cells.len());
    for c in &r.cells {
        let _ = PolyCone::generators(&c.regular);
    }
}
