//! Outer norm `|H|⁺ = sup {‖x*‖ : x* ∈ H(u*), ‖u*‖ ≤ 1}` of a positively homogeneous map.
//!
//! On a piece `{(Q y, P y) : y ∈ C}` the value is `+∞` exactly when some `y ∈ C` has
//! `Q y = 0` and `P y ≠ 0`. Otherwise the supremum of `‖P y‖² / ‖Q y‖²` over `C` is attained
//! in the relative interior of some face `F` of `C`, where `y` is a generalised eigenvector
//! of the pencil `(BᵀPᵀPB, BᵀQᵀQB)` on a basis `B` of `span F`. Each face is therefore
//! searched by descending eigenvalue until the eigenspace meets `F` outside `ker P ∩ ker Q`.

use crate::error::Result;
use crate::geometry::PolyCone;
use crate::linalg::{cholesky, complement, dot, lower_inverse, norm, null_space, orthonormal_span, sym_eigen, Mat};
use crate::scalar::Scalar;
use crate::tolerance::Tol;

use super::{PhMap, PhPiece};

#[derive(Clone, Debug)]
pub struct OuterNorm<T> {
    /// `|H|⁺`, possibly `+∞`.
    pub value: T,
    /// `(u*, x*)` on the graph attaining the value (`‖u*‖ = 1`), or with `u* = 0 ≠ x*` when
    /// the value is infinite.
    pub witness: Option<(Vec<T>, Vec<T>)>,
    /// Parameter `y` of the attaining piece, scaled like the witness.
    pub param: Option<Vec<T>>,
}

fn apply<T: Scalar>(rows: &[Vec<T>], y: &[T]) -> Vec<T> {
    rows.iter().map(|r| dot(r, y)).collect()
}

pub fn outer_norm<T: Scalar>(h: &PhMap<T>) -> Result<OuterNorm<T>> {
    let mut best = OuterNorm { value: T::zero(), witness: None, param: None };
    let mut best_sq = T::zero();
    for piece in &h.pieces {
        if let Some(w) = kernel_witness(piece)? {
            return Ok(OuterNorm { value: T::infinity(), witness: Some((w.0, w.1)), param: Some(w.2) });
        }
    }
    for piece in &h.pieces {
        if let Some((lam, y)) = piece_max(piece, best_sq)? {
            if lam > best_sq || best.witness.is_none() {
                let u = piece.input(&y);
                let x = piece.output(&y);
                let s = norm(&u);
                best_sq = lam;
                best = OuterNorm {
                    value: lam.max(T::zero()).sqrt(),
                    witness: Some((u.iter().map(|v| *v / s).collect(), x.iter().map(|v| *v / s).collect())),
                    param: Some(y.iter().map(|v| *v / s).collect()),
                };
            }
        }
    }
    Ok(best)
}

/// A generator of `C ∩ ker Q` with nonzero image under `P`.
#[allow(clippy::type_complexity)]
fn kernel_witness<T: Scalar>(piece: &PhPiece<T>) -> Result<Option<(Vec<T>, Vec<T>, Vec<T>)>> {
    let tol = Tol::<T>::current();
    let cone = piece.param.with_rows(&[], &piece.map_u);
    let g = cone.generators();
    let scale = piece.map_x.iter().map(|r| norm(r)).fold(T::one(), T::max);
    for y in g.rays.iter().chain(&g.lineality) {
        let x = piece.output(y);
        if norm(&x) > T::of(1e3) * tol.tau * scale {
            return Ok(Some((vec![T::zero(); piece.map_u.len()], x, y.clone())));
        }
    }
    Ok(None)
}

/// Largest `‖Py‖²/‖Qy‖²` over the piece (with its maximiser), skipping faces that cannot
/// beat `floor`.
fn piece_max<T: Scalar>(piece: &PhPiece<T>, floor: T) -> Result<Option<(T, Vec<T>)>> {
    let tol = Tol::<T>::current();
    let p = piece.param.dim();
    let poly = piece.param.as_polyhedron();
    let mut best: Option<(T, Vec<T>)> = None;
    for face in poly.faces(crate::geometry::FACE_BUDGET)? {
        let b = face.polyhedron().hull_directions();
        let d = b.len();
        if d == 0 {
            continue;
        }
        let pb: Vec<Vec<T>> = b.iter().map(|bj| apply(&piece.map_x, bj)).collect();
        let qb: Vec<Vec<T>> = b.iter().map(|bj| apply(&piece.map_u, bj)).collect();
        // rows of [PB; QB] as vectors in ℝᵈ
        let mut rows: Vec<Vec<T>> = Vec::new();
        for i in 0..piece.map_x.len() {
            rows.push(pb.iter().map(|c| c[i]).collect());
        }
        for i in 0..piece.map_u.len() {
            rows.push(qb.iter().map(|c| c[i]).collect());
        }
        let eps = tol.tau * T::of(10.0);
        let n0 = null_space(&rows, d, eps);
        let w = complement(&n0, d, eps);
        let k = w.len();
        if k == 0 {
            continue;
        }
        // reduced pencil on span W
        let pw: Vec<Vec<T>> = w.iter().map(|wj| combine(&pb, wj)).collect();
        let qw: Vec<Vec<T>> = w.iter().map(|wj| combine(&qb, wj)).collect();
        let gram = |v: &[Vec<T>]| {
            let mut g = Mat::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    g[(i, j)] = dot(&v[i], &v[j]);
                }
            }
            g
        };
        let a = gram(&pw);
        let g = gram(&qw);
        let Some(l) = cholesky(&g, eps * g.max_abs().max(T::one())) else { continue };
        let li = lower_inverse(&l);
        let m = li.mul(&a).mul(&li.transpose());
        let (vals, vecs) = sym_eigen(&m);
        if vals[0] <= floor * (T::one() + T::of(1e-12)) && best.is_some() {
            continue;
        }
        // eigenvectors in ℝᵈ coordinates: W L⁻ᵀ v
        let lit = li.transpose();
        let lift = |v: &Vec<T>| -> Vec<T> {
            let c = lit.mul_vec(v);
            combine(&w, &c)
        };
        let mut i = 0;
        while i < vals.len() {
            let lam = vals[i];
            if best.as_ref().is_some_and(|(bl, _)| lam <= *bl) {
                break;
            }
            let group_tol = T::of(1e-9) * lam.abs().max(T::one());
            let mut j = i;
            let mut span: Vec<Vec<T>> = n0.clone();
            while j < vals.len() && (vals[j] - lam).abs() <= group_tol {
                span.push(lift(&vecs[j]));
                j += 1;
            }
            // span in ℝᵖ
            let sp: Vec<Vec<T>> = span.iter().map(|s| combine(&b, s)).collect();
            let sp = orthonormal_span(&sp, eps);
            let perp = complement(&sp, p, eps);
            let cone = PolyCone::from_h(p, face.polyhedron().a().to_vec(), face.polyhedron().c().iter().cloned().chain(perp).collect());
            let gens = cone.generators();
            let hit = gens.rays.iter().chain(&gens.lineality).find(|y| norm(&piece.input(y)) > T::of(1e3) * eps);
            if let Some(y) = hit {
                best = Some((lam, y.clone()));
                break;
            }
            i = j;
        }
    }
    Ok(best)
}

/// `Σ_j c_j v_j`.
fn combine<T: Scalar>(v: &[Vec<T>], c: &[T]) -> Vec<T> {
    let len = v.first().map_or(0, |x| x.len());
    let mut out = vec![T::zero(); len];
    for (vj, cj) in v.iter().zip(c) {
        for (o, x) in out.iter_mut().zip(vj) {
            *o += *cj * *x;
        }
    }
    out
}
