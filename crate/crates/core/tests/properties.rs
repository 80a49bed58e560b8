//! Randomised invariants. Small integer data keeps degenerate configurations common.

use polylip::coderivative::{check_criterion, coderivative, projectional_coderivative};
use polylip::functions::PlFunction;
use nalgebra::{DMatrix, DVector};
use polylip::geometry::{project_polyhedron, tangent_cone, HPolyhedron, PolyCone, FACE_BUDGET};
use polylip::oracle::{estimate_modulus, SampleConfig};
use polylip::linalg::dot;
use polylip::reproduce::{instances, properties};
use polylip::stratified::build_lcp;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 256, ..ProptestConfig::default() }
}

fn int_vec(dim: usize, r: i32) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-r..=r).prop_map(f64::from), dim)
}

fn nonzero(dim: usize, r: i32) -> impl Strategy<Value = Vec<f64>> {
    int_vec(dim, r).prop_filter("nonzero", |v| v.iter().any(|x| *x != 0.0))
}

fn cone(dim: usize) -> impl Strategy<Value = PolyCone<f64>> {
    (prop::collection::vec(nonzero(dim, 3), 1..=dim + 2), prop::option::weighted(0.25, nonzero(dim, 2)))
        .prop_map(move |(rays, lin)| PolyCone::from_g(dim, rays, lin.into_iter().collect()))
}

fn cone_and_vector() -> impl Strategy<Value = (PolyCone<f64>, Vec<f64>)> {
    (1usize..=4).prop_flat_map(|d| (cone(d), int_vec(d, 4)))
}

/// `max_i (⟨gᵢ, x⟩ + cᵢ)` on `ℝⁿ`, optionally cut down to `{x : ⟨a, x⟩ ≤ b}`, with a point
/// on a kink or on the domain boundary.
fn pl_function() -> impl Strategy<Value = (PlFunction<f64>, Vec<f64>)> {
    (1usize..=2)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((int_vec(n, 3), (-1i32..=1).prop_map(f64::from)), 1..=3),
                prop::option::of((nonzero(n, 2), 1i32..=3)),
                any::<prop::sample::Index>(),
            )
        })
        .prop_map(|(pieces, cut, pick)| {
            let base = PlFunction::max_affine(&pieces).unwrap();
            let n = base.n;
            let f = match cut {
                None => base,
                Some((a, b)) => {
                    let h = HPolyhedron::inequalities(n, vec![a], vec![f64::from(b)]).unwrap();
                    let cells = base
                        .cells
                        .iter()
                        .map(|c| polylip::functions::PlCell { set: c.set.intersect(&h).unwrap(), g: c.g.clone(), c: c.c })
                        .filter(|c| !c.set.is_empty())
                        .collect();
                    PlFunction::new(n, cells).unwrap()
                }
            };
            let mut candidates: Vec<Vec<f64>> = f.cells.iter().filter_map(|c| c.set.vrep()).flat_map(|v| v.vertices.clone()).collect();
            if candidates.is_empty() {
                candidates.push(f.cells[0].set.relint_point().unwrap());
            }
            let x = pick.get(&candidates).clone();
            (f, x)
        })
}

/// Projection by brute force: project onto the affine hull of every face and keep the nearest
/// candidate that lands in the polyhedron.
fn project_by_faces(p: &HPolyhedron<f64>, v: &[f64]) -> Vec<f64> {
    let n = p.dim();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for face in p.faces(FACE_BUDGET).unwrap() {
        let (rows, _) = face.affine_hull();
        let x0 = face.relint_point();
        let diff = DVector::from_iterator(n, v.iter().zip(x0).map(|(a, b)| a - b));
        let step = if rows.is_empty() {
            diff
        } else {
            let m = DMatrix::<f64>::from_fn(rows.len(), n, |i, j| rows[i][j]);
            // the complement of the row space: eigenvectors of MᵀM with eigenvalue zero
            let eig = (m.transpose() * &m).symmetric_eigen();
            let u = eig.eigenvectors;
            let mut step = DVector::zeros(n);
            for j in 0..n {
                if eig.eigenvalues[j].abs() <= 1e-9 {
                    let col = u.column(j);
                    step += col * col.dot(&diff);
                }
            }
            step
        };
        let cand: Vec<f64> = x0.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        if p.contains(&cand) {
            let d: f64 = cand.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, cand));
            }
        }
    }
    best.unwrap().1
}

fn cut_box() -> impl Strategy<Value = (HPolyhedron<f64>, Vec<f64>)> {
    (2usize..=3).prop_flat_map(|d| (prop::collection::vec((nonzero(d, 3), 0i32..=3), 0..=3), int_vec(d, 5))).prop_map(
        |(cuts, v)| {
            let d = v.len();
            let mut p = HPolyhedron::boxed(&vec![-2.0; d], &vec![2.0; d]).unwrap();
            for (a, b) in cuts {
                p = p.intersect(&HPolyhedron::inequalities(d, vec![a], vec![f64::from(b)]).unwrap()).unwrap();
            }
            (p, v)
        },
    )
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn projection_agrees_with_face_enumeration((p, v) in cut_box()) {
        let fast = project_polyhedron(&p, &v).unwrap().point;
        let slow = project_by_faces(&p, &v);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() <= 1e-7, "{:?} vs {:?}", fast, slow);
        }
    }

    #[test]
    fn moreau_decomposition((k, v) in cone_and_vector()) {
        properties::moreau(&k, &v).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn polar_of_polar_is_the_cone(k in (1usize..=4).prop_flat_map(cone)) {
        properties::polar_involution(&k).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn tangent_and_normal_cones_are_polar(seed in any::<u64>(), dim in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = instances::polyhedron(&mut rng, dim, &vec![0.0; dim]);
        let x = instances::boundary_point(&mut rng, &p);
        properties::tangent_normal_polarity(&p, &x).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn interior_points_reduce_to_the_coderivative(m in prop::collection::vec(int_vec(2, 2), 2)) {
        let s = build_lcp(&m).unwrap();
        let x = HPolyhedron::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        properties::interior_reduction(&s, &x, &[0.0, 0.0], &[0.0, 0.0]).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn interior_points_of_linear_systems(seed in any::<u64>()) {
        let inst = instances::linear_system(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let (p, x) = &inst.interior;
        properties::interior_reduction(&inst.s, &inst.dom, p, x).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn kernel_norm_and_criterion_agree_on_lcps(
        m in prop::collection::vec(int_vec(2, 2), 2),
        normal in prop::option::of(nonzero(2, 2)),
    ) {
        let s = build_lcp(&m).unwrap();
        let x = match normal {
            None => HPolyhedron::full(2),
            Some(a) => HPolyhedron::inequalities(2, vec![a], vec![0.0]).unwrap(),
        };
        properties::criterion_equivalence(&s, &x, &[0.0, 0.0], &[0.0, 0.0]).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn kernel_norm_and_criterion_agree_on_linear_systems(seed in any::<u64>(), relative in any::<bool>()) {
        let inst = instances::linear_system(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let x = if relative { inst.dom.clone() } else { HPolyhedron::full(inst.dom.dim()) };
        let (p, u) = &inst.boundary;
        properties::criterion_equivalence(&inst.s, &x, p, u).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn epigraph_normals_above_the_graph_are_horizontal((f, x) in pl_function(), lift in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        properties::epigraph_proximal_slice(&f, &x, lift).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn function_and_profile_moduli_agree((f, x) in pl_function(), cut in prop::option::of(int_vec(2, 2))) {
        let n = f.n;
        let xs = match cut {
            Some(a) if a[..n].iter().any(|v| *v != 0.0) => {
                let a = a[..n].to_vec();
                let b = dot(&a, &x);
                HPolyhedron::inequalities(n, vec![a], vec![b]).unwrap()
            }
            _ => HPolyhedron::full(n),
        };
        properties::modulus_equality(&f, &xs, &x).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn outer_subgradients_are_limiting_subgradients((f, x) in pl_function(), v in int_vec(2, 3)) {
        let v = v[..f.n].to_vec();
        properties::outer_inside_basic(&f, &x, &v).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn projection_norm_equals_best_tangent_alignment(seed in any::<u64>(), dim in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = instances::polyhedron(&mut rng, dim, &vec![0.0; dim]);
        let x = instances::boundary_point(&mut rng, &p);
        let t = tangent_cone(&p, &x).unwrap();
        let xstar = instances::int_vec(&mut rng, dim, -3, 3);
        properties::projection_norm_identity(&t, &xstar, &mut rng).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn faces_partition_the_polyhedron(seed in any::<u64>(), dim in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = instances::polyhedron(&mut rng, dim, &vec![0.0; dim]);
        properties::faces_partition(&p, &mut rng).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn declared_normals_are_constant_on_strata(m in prop::collection::vec(int_vec(2, 2), 2), seed in any::<u64>()) {
        let s = build_lcp(&m).unwrap();
        properties::stratum_constancy(&s, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn linear_system_normals_are_constant_on_strata(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instances::linear_system(&mut rng).unwrap();
        properties::stratum_constancy(&inst.s, &mut rng).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn limits_of_regular_normals_are_limiting_normals(m in prop::collection::vec(int_vec(2, 2), 2), seed in any::<u64>()) {
        let s = build_lcp(&m).unwrap();
        properties::outer_semicontinuity(&s, &[0.0; 4], &mut ChaCha8Rng::seed_from_u64(seed)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn lcp_and_union_builders_agree(m in prop::collection::vec(int_vec(2, 2), 2), seed in any::<u64>()) {
        properties::builder_agreement(&m, 100, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn linear_system_domain_is_k_plus_range(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instances::linear_system(&mut rng).unwrap();
        properties::domain_formula(&inst.a, &inst.k, &inst.dom, &mut rng).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn coderivatives_are_positively_homogeneous(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instances::linear_system(&mut rng).unwrap();
        let (p, x) = &inst.boundary;
        let h = projectional_coderivative(&inst.s, &inst.dom, p, x).unwrap();
        properties::positive_homogeneity(&h, &mut rng).map_err(TestCaseError::fail)?;
        let d = coderivative(&inst.s, p, x).unwrap();
        properties::positive_homogeneity(&d, &mut rng).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn outer_norm_grows_with_the_graph(m in prop::collection::vec(int_vec(2, 2), 2), relative in any::<bool>()) {
        let s = build_lcp(&m).unwrap();
        let x = if relative { HPolyhedron::orthant(2) } else { HPolyhedron::full(2) };
        let h = projectional_coderivative(&s, &x, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        properties::outer_norm_monotone(&h).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn relative_level_set_modulus_is_at_most_classical((f, x) in pl_function(), v in int_vec(2, 3)) {
        properties::level_set_moduli_ordered(&f, &x, &v[..f.n]).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn finite_modulus_iff_trivial_horizon((f, x) in pl_function()) {
        properties::finite_iff_horizon_trivial(&f, &HPolyhedron::full(f.n), &x).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn bounded_faces_of_d_are_subgradients(seed in any::<u64>()) {
        let d = instances::support_set(&mut ChaCha8Rng::seed_from_u64(seed));
        properties::bounded_faces_are_subgradients(&d).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn sampled_bounds_stay_below_the_exact_modulus(seed in any::<u64>()) {
        let inst = instances::linear_system(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let (p, x) = &inst.boundary;
        let exact = check_criterion(&inst.s, &inst.dom, p, x).unwrap().modulus;
        let cfg = SampleConfig { seed, pairs_per_radius: 100, refine_steps: 40, ..SampleConfig::default() };
        let r = estimate_modulus(&inst.s, &inst.dom, p, x, &cfg, None).unwrap();
        for b in &r.lower_bounds {
            prop_assert!(b.ratio <= exact + 1e-3, "radius {}: {} > {}", b.radius, b.ratio, exact);
        }
    }
}
