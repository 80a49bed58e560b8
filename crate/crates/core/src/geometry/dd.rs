//! Double description: generators of `{y : A y ≤ 0, E y = 0}`.
//!
//! The lineality space is split off first so the incremental algorithm only ever sees a
//! pointed cone of full dimension in its own coordinates. Adjacency uses the combinatorial
//! test on zero sets.

use crate::error::{Error, Result};
use crate::linalg::{concat, dot, normalized, null_space, orthonormal_span, solve, Mat};
use crate::scalar::Scalar;
use crate::tolerance::Tol;

#[derive(Clone, Debug, PartialEq)]
pub struct ConeGenerators<T> {
    /// Unit extreme rays of the pointed part (orthogonal to the lineality space).
    pub rays: Vec<Vec<T>>,
    /// Orthonormal basis of the lineality space.
    pub lineality: Vec<Vec<T>>,
}

impl<T: Scalar> ConeGenerators<T> {
    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray<T> {
    z: Vec<T>,
    zero: Bits,
}

/// Generators of the cone `{y ∈ ℝᵖ : a_i·y ≤ 0, e_j·y = 0}`.
pub fn cone_generators<T: Scalar>(p: usize, a: &[Vec<T>], e: &[Vec<T>]) -> Result<ConeGenerators<T>> {
    let tol = Tol::<T>::current();
    let eps = tol.tau;
    let all: Vec<Vec<T>> = a.iter().chain(e.iter()).cloned().collect();
    let lineality = null_space(&all, p, eps);
    let fixing: Vec<Vec<T>> = e.iter().chain(lineality.iter()).cloned().collect();
    let basis = null_space(&fixing, p, eps);
    let k = basis.len();
    if k == 0 {
        return Ok(ConeGenerators { rays: Vec::new(), lineality });
    }
    // Rows in the coordinates of `basis`.
    let mut rows: Vec<Vec<T>> = Vec::new();
    for ai in a {
        let r: Vec<T> = basis.iter().map(|bj| dot(ai, bj)).collect();
        if let Some(u) = normalized(&r, eps) {
            if !rows.iter().any(|q| q.iter().zip(&u).all(|(x, y)| (*x - *y).abs() <= eps)) {
                rows.push(u);
            }
        }
    }
    let nrows = rows.len();
    // Greedy independent initial rows.
    let mut init: Vec<usize> = Vec::new();
    let mut span: Vec<Vec<T>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = span.clone();
        trial.push(r.clone());
        let o = orthonormal_span(&trial, T::of(1e-6).max(eps));
        if o.len() > span.len() {
            span = o;
            init.push(i);
            if init.len() == k {
                break;
            }
        }
    }
    if init.len() < k {
        return Err(Error::Numerical("pointed part lost rank while splitting lineality".into()));
    }
    let a_init = Mat::from_rows(&init.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>(), k);
    let mut rays: Vec<Ray<T>> = Vec::new();
    for j in 0..k {
        let mut rhs = vec![T::zero(); k];
        rhs[j] = -T::one();
        let z = solve(&a_init, &rhs, T::epsilon())
            .ok_or_else(|| Error::Numerical("singular initial simplex".into()))?;
        let z = normalized(&z, T::zero()).expect("nonzero solution");
        let mut zero = Bits::new(nrows);
        for (jj, &i) in init.iter().enumerate() {
            if jj != j {
                zero.set(i);
            }
        }
        rays.push(Ray { z, zero });
    }
    let in_init: Vec<bool> = (0..nrows).map(|i| init.contains(&i)).collect();
    for i in 0..nrows {
        if in_init[i] {
            continue;
        }
        let row = &rows[i];
        let vals: Vec<T> = rays.iter().map(|r| dot(row, &r.z)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j] > eps).collect();
        if pos.is_empty() {
            for (j, r) in rays.iter_mut().enumerate() {
                if vals[j].abs() <= eps {
                    r.zero.set(i);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j] < -eps).collect();
        let mut next: Vec<Ray<T>> = Vec::new();
        for &pj in &pos {
            for &nj in &neg {
                let common = rays[pj].zero.and(&rays[nj].zero);
                if common.count() + 2 < k {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(q, r)| q != pj && q != nj && common.subset_of(&r.zero));
                if blocked {
                    continue;
                }
                let sp = vals[pj];
                let sn = -vals[nj];
                let w: Vec<T> = rays[nj].z.iter().zip(&rays[pj].z).map(|(rn, rp)| sp * *rn + sn * *rp).collect();
                if let Some(w) = normalized(&w, T::epsilon()) {
                    let mut zero = common;
                    zero.set(i);
                    next.push(Ray { z: w, zero });
                }
            }
        }
        let mut kept: Vec<Ray<T>> = Vec::new();
        for (j, mut r) in rays.into_iter().enumerate() {
            if vals[j] > eps {
                continue;
            }
            if vals[j].abs() <= eps {
                r.zero.set(i);
            }
            kept.push(r);
        }
        kept.extend(next);
        rays = kept;
    }
    let mut out: Vec<Vec<T>> = Vec::new();
    for r in rays {
        let mut y = vec![T::zero(); p];
        for (zj, bj) in r.z.iter().zip(&basis) {
            for (yi, bi) in y.iter_mut().zip(bj) {
                *yi += *zj * *bi;
            }
        }
        if let Some(y) = normalized(&y, eps) {
            if !out.iter().any(|q| q.iter().zip(&y).all(|(x, yy)| (*x - *yy).abs() <= T::of(1e3) * eps)) {
                out.push(y);
            }
        }
    }
    Ok(ConeGenerators { rays: out, lineality })
}

/// H-form `(rows, equality rows)` of the cone generated by `rays` and `lineality`.
pub fn cone_hrep<T: Scalar>(p: usize, rays: &[Vec<T>], lineality: &[Vec<T>]) -> Result<(Vec<Vec<T>>, Vec<Vec<T>>)> {
    let polar = cone_generators(p, rays, lineality)?;
    Ok((polar.rays, polar.lineality))
}

/// Vertices, rays and lineality of `{x : A x ≤ b, C x = d}` via homogenisation.
/// Returns `None` when the polyhedron is empty.
#[allow(clippy::type_complexity)]
pub fn polyhedron_generators<T: Scalar>(
    n: usize,
    a: &[Vec<T>],
    b: &[T],
    c: &[Vec<T>],
    d: &[T],
) -> Result<Option<(Vec<Vec<T>>, Vec<Vec<T>>, Vec<Vec<T>>)>> {
    let eps = Tol::<T>::current().tau;
    let mut rows: Vec<Vec<T>> = a.iter().zip(b).map(|(ai, bi)| concat(ai, &[-*bi])).collect();
    let mut t_row = vec![T::zero(); n + 1];
    t_row[n] = -T::one();
    rows.push(t_row);
    let eqs: Vec<Vec<T>> = c.iter().zip(d).map(|(ci, di)| concat(ci, &[-*di])).collect();
    let g = cone_generators(n + 1, &rows, &eqs)?;
    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for r in &g.rays {
        let t = r[n];
        if t > eps {
            vertices.push(r[..n].iter().map(|x| *x / t).collect::<Vec<T>>());
        } else if let Some(u) = normalized(&r[..n], eps) {
            rays.push(u);
        }
    }
    if vertices.is_empty() {
        return Ok(None);
    }
    let lineality = orthonormal_span(&g.lineality.iter().map(|l| l[..n].to_vec()).collect::<Vec<_>>(), eps);
    Ok(Some((vertices, rays, lineality)))
}
