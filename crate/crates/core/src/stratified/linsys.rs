use crate::error::{Error, Result};
use crate::geometry::{ConeUnion, HPolyhedron, PolyCone, VRep, FACE_BUDGET};
use crate::linalg::{concat, Mat};
use crate::scalar::Scalar;

use super::{Stratum, StratifiedMapping};

/// Solution mapping `p ↦ {x ∈ ℝⁿ : A x + p ∈ K}` of a linear system over a polyhedron
/// `K ⊂ ℝᵐ`, with graph coordinates `(p, x)`.
///
/// One stratum per face `F` of `K`: `{(p, x) : A x + p ∈ ri F}`, whose normal cone is
/// `{(y, Aᵀy) : y ∈ N_K(F)}`.
pub fn build_linear_system<T: Scalar>(a_rows: &[Vec<T>], k: &HPolyhedron<T>) -> Result<StratifiedMapping<T>> {
    let m = k.dim();
    if a_rows.len() != m {
        return Err(Error::Schema(format!("A has {} rows but K lives in dimension {m}", a_rows.len())));
    }
    let n = a_rows.first().map_or(0, |r| r.len());
    if a_rows.iter().any(|r| r.len() != n) {
        return Err(Error::Schema("rows of A have different lengths".into()));
    }
    if k.is_empty() {
        return Err(Error::Domain("K is empty".into()));
    }
    let a = Mat::from_rows(a_rows, n);
    // k-row r of K gives the graph row (r, Aᵀr) acting on (p, x)
    let lift = |r: &Vec<T>| concat(r, &a.tmul_vec(r));
    let graph = HPolyhedron::new(
        m + n,
        k.a().iter().map(lift).collect(),
        k.b().to_vec(),
        k.c().iter().map(lift).collect(),
        k.d().to_vec(),
    )?;
    let mut strata = Vec::new();
    for f in k.faces(FACE_BUDGET)? {
        let (mut ca, mut cb, mut cc, mut cd) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (i, (r, bi)) in k.a().iter().zip(k.b()).enumerate() {
            if f.active.contains(&i) {
                cc.push(lift(r));
                cd.push(*bi);
            } else {
                ca.push(lift(r));
                cb.push(*bi);
            }
        }
        cc.extend(k.c().iter().map(lift));
        cd.extend(k.d().iter().copied());
        let cell = HPolyhedron::new(m + n, ca, cb, cc, cd)?;
        let rays: Vec<Vec<T>> = f.active.iter().map(|&i| lift(&k.a()[i])).collect();
        let lin: Vec<Vec<T>> = k.c().iter().map(lift).collect();
        let normals = ConeUnion::new(m + n, vec![PolyCone::from_g(m + n, rays, lin)]);
        let label = format!("face{{{}}}", f.active.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","));
        strata.push(Stratum::new(cell, normals, label)?);
    }
    // dom S = K + rg A
    let kv = k.vrep().ok_or_else(|| Error::Domain("K is empty".into()))?;
    let mut lineality = kv.lineality.clone();
    lineality.extend(a.col_vecs());
    let dom = HPolyhedron::from_vrep(&VRep { dim: m, vertices: kv.vertices.clone(), rays: kv.rays.clone(), lineality })?;
    Ok(StratifiedMapping::assemble(m, n, strata, vec![graph], Some(dom)))
}
