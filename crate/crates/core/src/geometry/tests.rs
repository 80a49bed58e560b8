use super::*;
use approx::assert_abs_diff_eq;

fn unit_square() -> HPolyhedron<f64> {
    HPolyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
}

#[test]
fn polar_of_orthant_is_negative_orthant() {
    let k = PolyCone::<f64>::orthant(2);
    let p = polar(&k);
    assert!(p.contains(&[-1.0, -3.0]));
    assert!(!p.contains(&[1.0, -3.0]));
    let neg = PolyCone::from_g(2, vec![vec![-1.0, 0.0], vec![0.0, -1.0]], vec![]);
    assert!(p.same_as(&neg));
}

#[test]
fn polar_of_two_ray_cone() {
    let k = PolyCone::from_g(2, vec![vec![1.0, 1.0], vec![1.0, -1.0]], vec![]);
    let p = polar(&k);
    let expect = PolyCone::from_g(2, vec![vec![-1.0, 1.0], vec![-1.0, -1.0]], vec![]);
    assert!(p.same_as(&expect));
}

#[test]
fn face_counts() {
    assert_eq!(faces(&unit_square(), FACE_BUDGET).unwrap().len(), 9);
    assert_eq!(faces(&HPolyhedron::<f64>::orthant(2), FACE_BUDGET).unwrap().len(), 4);
    let halfplane = HPolyhedron::inequalities(2, vec![vec![0.0, -1.0]], vec![0.0]).unwrap();
    assert_eq!(faces(&halfplane, FACE_BUDGET).unwrap().len(), 2);
}

#[test]
fn excess_of_square_over_origin() {
    let e = excess(&unit_square(), &HPolyhedron::point(&[0.0, 0.0])).unwrap();
    assert_abs_diff_eq!(e.value, 2f64.sqrt(), epsilon = 1e-12);
    let empty = HPolyhedron::<f64>::inequalities(1, vec![vec![1.0], vec![-1.0]], vec![0.0, -1.0]).unwrap();
    assert!(empty.is_empty());
    assert_eq!(excess(&empty, &HPolyhedron::point(&[0.0])).unwrap().value, 0.0);
    assert!(excess(&HPolyhedron::point(&[0.0]), &empty).unwrap().value.is_infinite());
    let ray = HPolyhedron::<f64>::inequalities(1, vec![vec![-1.0]], vec![0.0]).unwrap();
    assert!(excess(&ray, &HPolyhedron::point(&[0.0])).unwrap().value.is_infinite());
}

#[test]
fn support_of_box() {
    let d = HPolyhedron::boxed(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
    let s = support(&d, &[1.0, 1.0]);
    assert_abs_diff_eq!(s.value, 2.0, epsilon = 1e-12);
    let f = s.face.unwrap();
    assert_eq!(f.dim(), 0);
    assert_abs_diff_eq!(f.relint_point()[0], 1.0, epsilon = 1e-12);
    let s0 = support(&d, &[0.0, 0.0]);
    assert_eq!(s0.value, 0.0);
    assert_eq!(s0.face.unwrap().dim(), 2);
    let half = HPolyhedron::<f64>::inequalities(2, vec![vec![0.0, 1.0]], vec![0.0]).unwrap();
    assert!(support(&half, &[1.0, 0.0]).value.is_infinite());
    assert_abs_diff_eq!(support(&half, &[0.0, 2.0]).value, 0.0, epsilon = 1e-12);
}

#[test]
fn moreau_on_orthant() {
    let k = PolyCone::<f64>::orthant(2);
    let pr = project_cone(&k, &[-1.0, 2.0]).unwrap();
    assert_abs_diff_eq!(pr.point[0], 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(pr.point[1], 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(pr.dual[0], -1.0, epsilon = 1e-14);
    assert!(polar(&k).contains(&pr.dual));
}

#[test]
fn vrep_roundtrip() {
    let p = HPolyhedron::inequalities(
        2,
        vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
        vec![0.0, 0.0, 1.0],
    )
    .unwrap();
    let v = hrep_to_vrep(&p).unwrap();
    assert_eq!(v.vertices.len(), 3);
    let q = vrep_to_hrep(&v).unwrap();
    for x in [[0.2, 0.2], [0.9, 0.05], [0.6, 0.6], [-0.1, 0.3]] {
        assert_eq!(p.contains(&x), q.contains(&x));
    }
}

#[test]
fn tangent_and_normal_at_corner() {
    let sq = unit_square();
    let t = tangent_cone(&sq, &[0.0, 0.0]).unwrap();
    assert!(t.same_as(&PolyCone::orthant(2)));
    let n = normal_cone_convex(&sq, &[0.0, 0.0]).unwrap();
    assert!(n.same_as(&polar(&t)));
    let t_int = tangent_cone(&sq, &[0.5, 0.5]).unwrap();
    assert!(t_int.same_as(&PolyCone::whole(2)));
}

#[test]
fn projection_onto_polyhedron_with_equality() {
    let p = HPolyhedron::new(2, vec![vec![-1.0, 0.0]], vec![0.0], vec![vec![1.0, 1.0]], vec![1.0]).unwrap();
    let pr = project_polyhedron(&p, &[-2.0, 0.0]).unwrap();
    assert_abs_diff_eq!(pr.point[0], 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(pr.point[1], 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(pr.distance, 5f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn works_in_single_precision() {
    let k = PolyCone::<f32>::from_g(2, vec![vec![1.0, 1.0], vec![1.0, -1.0]], vec![]);
    let pr = project_cone(&k, &[-1.0, 0.5]).unwrap();
    assert!(pr.point.iter().all(|x| x.abs() < 1e-5));
    assert_eq!(faces(&HPolyhedron::<f32>::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), FACE_BUDGET).unwrap().len(), 9);
}
