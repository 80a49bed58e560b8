//! Support functions `h = σ_D` of polyhedra, analysed through the exposed faces of `D`
//! paired with the faces of its recession cone.

use crate::coderivative::projection_regions;
use crate::error::Result;
use crate::geometry::{excess, horizon_cone, HPolyhedron, PolyCone, FACE_BUDGET};
use crate::scalar::Scalar;

use super::{dedup, max_norm, project_onto_regions};

/// One exposed face `F_{D,x}` with the face `F_{K,x} = K ∩ x^⊥` of `K = D^∞` exposed by the
/// same `x`.
#[derive(Clone, Debug)]
pub struct FacePair<T> {
    /// Exposing direction: the sum of the rows of `D` tight on the face, which lies in the
    /// relative interior of its normal cone.
    pub x: Vec<T>,
    pub face: HPolyhedron<T>,
    pub cone_face: PolyCone<T>,
    /// `(F_{D,x})^∞ = F_{K,x}`.
    pub recession_matches: bool,
    /// `e(F_{D,x}, F_{K,x})`.
    pub excess: T,
    pub bounded: bool,
}

#[derive(Clone, Debug)]
pub struct SublinearReport<T> {
    pub pairs: Vec<FacePair<T>>,
    /// `∂_{dom h} h(0)` as a union of polyhedra.
    pub subgradients: Vec<HPolyhedron<T>>,
    /// `proj_{K*} D`.
    pub projection_of_d: Vec<HPolyhedron<T>>,
    pub bounded_faces: Vec<HPolyhedron<T>>,
    /// `max e(F_{D,x}, F_{K,x})` over the pairs.
    pub modulus: T,
    /// `max ‖v‖` over `∂_{dom h} h(0)`.
    pub subgradient_norm: T,
}

/// Exposed-face analysis of `σ_D` at the origin relative to its domain.
///
/// Exposed faces of `D` are constant on the relative interior of each cone of the normal fan,
/// so one direction per face of `D` covers every `x` in `dom h`.
pub fn sublinear_analysis<T: Scalar>(d: &HPolyhedron<T>) -> Result<SublinearReport<T>> {
    let n = d.dim();
    let k = horizon_cone(d);
    let mut pairs = Vec::new();
    let mut subgradients = Vec::new();
    let mut projection_of_d = Vec::new();
    let mut bounded_faces = Vec::new();
    for face in d.faces(FACE_BUDGET)? {
        let mut x = vec![T::zero(); n];
        for &i in &face.active {
            for (xi, ai) in x.iter_mut().zip(&d.a()[i]) {
                *xi += *ai;
            }
        }
        let cone_face = k.with_rows(&[], &[x.clone()]);
        let f = face.polyhedron().clone();
        let rec = PolyCone::from_h(n, f.a().to_vec(), f.c().to_vec());
        let recession_matches = rec.same_as(&cone_face);
        let e = excess(&f, cone_face.as_polyhedron())?.value;
        let regions = projection_regions(&cone_face.polar())?;
        let projected = project_onto_regions(&f, &regions)?;
        if face.active.is_empty() {
            projection_of_d.extend(projected.iter().cloned());
        }
        subgradients.extend(projected);
        let bounded = face.is_bounded();
        if bounded {
            bounded_faces.push(f.clone());
        }
        pairs.push(FacePair { x, face: f, cone_face, recession_matches, excess: e, bounded });
    }
    let modulus = pairs.iter().map(|p| p.excess).fold(T::zero(), T::max);
    let subgradients = dedup(subgradients);
    let (subgradient_norm, _) = max_norm(&subgradients);
    Ok(SublinearReport { pairs, subgradients, projection_of_d, bounded_faces, modulus, subgradient_norm })
}
