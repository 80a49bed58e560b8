use crate::error::{Error, Result};
use crate::geometry::{ConeUnion, HPolyhedron, PolyCone};
use crate::linalg::{dot, Mat};
use crate::scalar::Scalar;
use crate::tolerance::Tol;

use super::{triple_label, Stratum, StratifiedMapping};

/// Largest number of biactive indices whose normal-cone factors are expanded.
pub const MAX_BIACTIVE: usize = 6;

/// Solution mapping `q ↦ {x ≥ 0 : M x + q ≥ 0, ⟨x, M x + q⟩ = 0}` of a linear
/// complementarity problem, with graph coordinates `(q, x)`.
///
/// Strata are indexed by partitions `(I₁, I₂, I₃)` of the indices: `x_i = 0 < w_i` on `I₁`,
/// `x_i > 0 = w_i` on `I₂`, `x_i = 0 = w_i` on `I₃`, where `w = M x + q`. Normal cones are
/// `{(u, Mᵀu + v)}` with `(u_i, v_i)` in `{0}×ℝ`, `ℝ×{0}` or `Ω` on the three index classes,
/// `Ω = (ℝ×{0}) ∪ ({0}×ℝ) ∪ ℝ²₋`.
pub fn build_lcp<T: Scalar>(m_rows: &[Vec<T>]) -> Result<StratifiedMapping<T>> {
    let m = m_rows.len();
    if m == 0 || m_rows.iter().any(|r| r.len() != m) {
        return Err(Error::Schema("LCP matrix must be square and nonempty".into()));
    }
    let mm = Mat::from_rows(m_rows, m);
    let dim = 2 * m;
    // row helpers in (q, x) coordinates
    let x_row = |i: usize| {
        let mut r = vec![T::zero(); dim];
        r[m + i] = T::one();
        r
    };
    let w_row = |i: usize| {
        let mut r = vec![T::zero(); dim];
        r[i] = T::one();
        for j in 0..m {
            r[m + j] = mm[(i, j)];
        }
        r
    };
    let neg = |r: Vec<T>| r.into_iter().map(|v| -v).collect::<Vec<T>>();

    // Closed pieces: one per complementarity pattern.
    let mut pieces = Vec::new();
    for mask in 0..(1usize << m) {
        let (mut a, mut c) = (Vec::new(), Vec::new());
        for i in 0..m {
            if mask >> i & 1 == 0 {
                c.push(x_row(i));
                a.push(neg(w_row(i)));
            } else {
                c.push(w_row(i));
                a.push(neg(x_row(i)));
            }
        }
        let p = HPolyhedron::new(dim, a, vec![T::zero(); m], c, vec![T::zero(); m])?;
        if !p.is_empty() {
            pieces.push(p);
        }
    }

    // Normal generators in (q*, x*) coordinates: u_i ↦ (e_i, Mᵀe_i), v_i ↦ (0, e_i).
    let u_gen = |i: usize| w_row(i);
    let v_gen = |i: usize| x_row(i);

    let tol = Tol::<T>::current();
    let mut strata = Vec::new();
    let total = 3usize.pow(m as u32);
    for code in 0..total {
        let mut class = vec![0u8; m];
        let mut k = code;
        for c in class.iter_mut() {
            *c = (k % 3) as u8;
            k /= 3;
        }
        let idx = |t: u8| (0..m).filter(|&i| class[i] == t).collect::<Vec<usize>>();
        let (i1, i2, i3) = (idx(0), idx(1), idx(2));
        if i3.len() > MAX_BIACTIVE {
            return Err(Error::Budget(format!("{} biactive indices exceed the cap of {MAX_BIACTIVE}", i3.len())));
        }
        let (mut a, mut c) = (Vec::new(), Vec::new());
        for &i in &i1 {
            c.push(x_row(i));
            a.push(neg(w_row(i)));
        }
        for &i in &i2 {
            c.push(w_row(i));
            a.push(neg(x_row(i)));
        }
        for &i in &i3 {
            c.push(x_row(i));
            c.push(w_row(i));
        }
        let cell = HPolyhedron::new(dim, a, vec![T::zero(); i1.len() + i2.len()], c, vec![T::zero(); m + i3.len()])?;
        let Some(p) = cell.relint_point() else { continue };
        let strict_ok = i1.iter().all(|&i| dot(&w_row(i), &p) > tol.tau) && i2.iter().all(|&i| dot(&x_row(i), &p) > tol.tau);
        if !strict_ok {
            continue;
        }
        // Ω factor choices for the biactive indices: 0 = ℝ×{0}, 1 = {0}×ℝ, 2 = ℝ²₋.
        let mut cones = Vec::new();
        for choice in 0..3usize.pow(i3.len() as u32) {
            let mut rays = Vec::new();
            let mut lin = Vec::new();
            for &i in &i1 {
                lin.push(v_gen(i));
            }
            for &i in &i2 {
                lin.push(u_gen(i));
            }
            let mut ch = choice;
            for &i in &i3 {
                match ch % 3 {
                    0 => lin.push(u_gen(i)),
                    1 => lin.push(v_gen(i)),
                    _ => {
                        rays.push(neg(u_gen(i)));
                        rays.push(neg(v_gen(i)));
                    }
                }
                ch /= 3;
            }
            cones.push(PolyCone::from_g(dim, rays, lin));
        }
        let label = triple_label([&i1, &i2, &i3]);
        strata.push(Stratum::new(cell, ConeUnion::new(dim, cones).pruned(), label)?);
    }
    let dom = super::union::convex_domain(&pieces, m)?;
    Ok(StratifiedMapping::assemble(m, m, strata, pieces, dom))
}
