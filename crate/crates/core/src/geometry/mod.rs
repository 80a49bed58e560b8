//! Polyhedral convex geometry: polyhedra, cones, faces, projections, support functions.

pub mod cone;
pub mod dd;
pub mod face;
pub mod polyhedron;

pub use cone::{ConeProjection, ConeUnion, PolyCone};
pub use dd::ConeGenerators;
pub use face::Face;
pub use polyhedron::{HPolyhedron, Projection, Support, VRep, FACE_BUDGET};

use crate::error::{Error, Result};
use crate::geometry::dd::cone_generators;
use crate::linalg::{concat, norm};
use crate::scalar::Scalar;
use crate::tolerance::Tol;

/// Polar cone `K* = {v : ⟨v, x⟩ ≤ 0 ∀x ∈ K}`.
pub fn polar<T: Scalar>(k: &PolyCone<T>) -> PolyCone<T> {
    k.polar()
}

/// Tangent cone of a polyhedron at one of its points: `{w : a_i·w ≤ 0 (i active), C w = 0}`.
pub fn tangent_cone<T: Scalar>(p: &HPolyhedron<T>, x: &[T]) -> Result<PolyCone<T>> {
    if !p.contains(x) {
        return Err(Error::Domain("tangent cone requested at a point outside the set".into()));
    }
    let act = p.active_set(x);
    Ok(PolyCone::from_h(p.dim(), act.iter().map(|&i| p.a()[i].clone()).collect(), p.c().to_vec()))
}

/// Normal cone of a polyhedron at one of its points, in G-form (active rows and equality rows).
pub fn normal_cone_convex<T: Scalar>(p: &HPolyhedron<T>, x: &[T]) -> Result<PolyCone<T>> {
    if !p.contains(x) {
        return Err(Error::Domain("normal cone requested at a point outside the set".into()));
    }
    let act = p.active_set(x);
    Ok(PolyCone::from_g(p.dim(), act.iter().map(|&i| p.a()[i].clone()).collect(), p.c().to_vec()))
}

pub fn faces<T: Scalar>(p: &HPolyhedron<T>, budget: usize) -> Result<Vec<Face<T>>> {
    p.faces(budget)
}

pub fn face_of_relint<T: Scalar>(p: &HPolyhedron<T>, x: &[T]) -> Result<Face<T>> {
    p.face_of_relint(x)
}

pub fn project_cone<T: Scalar>(k: &PolyCone<T>, v: &[T]) -> Result<ConeProjection<T>> {
    k.project(v)
}

pub fn project_polyhedron<T: Scalar>(p: &HPolyhedron<T>, v: &[T]) -> Result<Projection<T>> {
    p.project(v)
}

/// `d(x, P)`, with `d(x, ∅) = +∞`.
pub fn distance<T: Scalar>(x: &[T], p: &HPolyhedron<T>) -> Result<T> {
    p.distance(x)
}

/// `d(x, ∪ P_i)`.
pub fn distance_to_union<T: Scalar>(x: &[T], pieces: &[HPolyhedron<T>]) -> Result<T> {
    let mut best = T::infinity();
    for p in pieces {
        best = best.min(p.distance(x)?);
    }
    Ok(best)
}

/// Excess `e(A, B) = sup_{a∈A} d(a, B)` with the conventions `e(∅, B) = 0` and
/// `e(A, ∅) = +∞` for nonempty `A`. The witness is a vertex of `A` attaining the value.
#[derive(Clone, Debug)]
pub struct Excess<T> {
    pub value: T,
    pub witness: Option<Vec<T>>,
}

pub fn excess<T: Scalar>(a: &HPolyhedron<T>, b: &HPolyhedron<T>) -> Result<Excess<T>> {
    let Some(va) = a.vrep() else {
        return Ok(Excess { value: T::zero(), witness: None });
    };
    if b.is_empty() {
        return Ok(Excess { value: T::infinity(), witness: va.vertices.first().cloned() });
    }
    let rec = b.recession_cone();
    let neg = |v: &Vec<T>| v.iter().map(|x| -*x).collect::<Vec<T>>();
    // A direction of A outside the recession cone of B makes the distance grow without bound.
    let unbounded = va.rays.iter().any(|r| !rec.contains(r))
        || va.lineality.iter().any(|l| !rec.contains(l) || !rec.contains(&neg(l)));
    if unbounded {
        return Ok(Excess { value: T::infinity(), witness: va.vertices.first().cloned() });
    }
    let mut best = T::zero();
    let mut witness = None;
    for v in &va.vertices {
        let d = b.distance(v)?;
        if witness.is_none() || d > best {
            best = d;
            witness = Some(v.clone());
        }
    }
    Ok(Excess { value: best, witness })
}

pub fn support<T: Scalar>(p: &HPolyhedron<T>, x: &[T]) -> Support<T> {
    p.support(x)
}

/// Horizon (recession) cone of a polyhedron.
pub fn horizon_cone<T: Scalar>(p: &HPolyhedron<T>) -> PolyCone<T> {
    PolyCone::from_h(p.dim(), p.a().to_vec(), p.c().to_vec())
}

pub fn hrep_to_vrep<T: Scalar>(p: &HPolyhedron<T>) -> Option<VRep<T>> {
    p.vrep().cloned()
}

/// Polyhedron generated by `conv(vertices) + cone(rays) + span(lineality)`.
pub fn vrep_to_hrep<T: Scalar>(v: &VRep<T>) -> Result<HPolyhedron<T>> {
    let n = v.dim;
    if v.vertices.is_empty() {
        // canonical empty set
        let mut r = vec![T::zero(); n];
        if n > 0 {
            r[0] = T::one();
            return HPolyhedron::new(n, vec![r.clone(), r.iter().map(|x| -*x).collect()], vec![T::zero(), -T::one()], vec![], vec![]);
        }
        return HPolyhedron::new(0, vec![], vec![], vec![], vec![]);
    }
    // Polar of the homogenised generator cone; its generators (a, β) give a·x ≤ -β.
    let mut gens: Vec<Vec<T>> = v.vertices.iter().map(|w| concat(w, &[T::one()])).collect();
    gens.extend(v.rays.iter().map(|r| concat(r, &[T::zero()])));
    let lins: Vec<Vec<T>> = v.lineality.iter().map(|l| concat(l, &[T::zero()])).collect();
    let polar = cone_generators(n + 1, &gens, &lins)?;
    let tol = Tol::<T>::current();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for g in &polar.rays {
        if norm(&g[..n]) > tol.tau {
            a.push(g[..n].to_vec());
            b.push(-g[n]);
        }
    }
    let mut c = Vec::new();
    let mut d = Vec::new();
    for l in &polar.lineality {
        if norm(&l[..n]) > tol.tau {
            c.push(l[..n].to_vec());
            d.push(-l[n]);
        }
    }
    HPolyhedron::new(n, a, b, c, d)
}

/// `‖proj_K(x)‖ = max{ max_{w ∈ K, ‖w‖=1} ⟨x, w⟩, 0 }`.
pub fn projected_norm<T: Scalar>(k: &PolyCone<T>, x: &[T]) -> Result<T> {
    Ok(norm(&k.project(x)?.point))
}

#[cfg(test)]
mod tests;
