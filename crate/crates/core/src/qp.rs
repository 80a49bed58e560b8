//! Euclidean projection onto `{x : A x ≤ b, C x = d}`.
//!
//! Dual active-set method of Goldfarb and Idnani specialised to the identity Hessian:
//! start from the unconstrained minimiser `v` and add violated constraints one at a time,
//! dropping active inequalities whose multiplier would turn negative. The QR factor of the
//! active normals is recomputed from scratch at every change; active sets are tiny.
//!
//! The returned multipliers certify optimality: `v - p = Aᵀλ + Cᵀμ` with `λ ≥ 0`
//! supported on rows tight at `p`.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, householder_qr, norm, upper_solve};
use crate::scalar::Scalar;
use crate::tolerance::Tol;

#[derive(Clone, Debug)]
pub struct QpSolution<T> {
    pub point: Vec<T>,
    /// Multipliers of the inequality rows (zero for inactive rows).
    pub lambda: Vec<T>,
    /// Multipliers of the equality rows.
    pub mu: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Ineq(usize),
    Eq(usize, bool), // row, flipped sign
}

struct Active<T> {
    kinds: Vec<Kind>,
    normals: Vec<Vec<T>>,
    u: Vec<T>,
}

/// Nearest point of the polyhedron to `v`, or `Error::Domain` if the polyhedron is empty.
pub fn project<T: Scalar>(v: &[T], a: &[Vec<T>], b: &[T], c: &[Vec<T>], d: &[T]) -> Result<QpSolution<T>> {
    let n = v.len();
    let tol = Tol::<T>::current();
    let eps = (tol.tau * T::of(1e-3)).max(T::epsilon() * T::of(64.0));
    let viol_eps = (tol.tau * T::of(1e-2)).max(T::epsilon() * T::of(64.0));
    let mut x = v.to_vec();
    let mut act = Active { kinds: Vec::new(), normals: Vec::new(), u: Vec::new() };
    // dependent rows violated within tolerance are dropped rather than reported as infeasible
    let mut skipped = vec![false; a.len()];

    // Constraint in "≥" form: nᵀx ≥ b0. Inequalities a x ≤ b become (-a) x ≥ -b.
    let ineq_normal = |i: usize| -> Vec<T> { a[i].iter().map(|t| -*t).collect() };

    // Equalities first; they are never dropped.
    for j in 0..c.len() {
        let s = dot(&c[j], &x) - d[j];
        let (np, b0, flipped) = if s > T::zero() {
            (c[j].iter().map(|t| -*t).collect::<Vec<T>>(), -d[j], true)
        } else {
            (c[j].clone(), d[j], false)
        };
        add_constraint(&mut x, &mut act, Kind::Eq(j, flipped), np, b0, n, eps)?;
    }

    let scale_b = b.iter().fold(T::one(), |m, t| m.max(t.abs()));
    for _iter in 0..(50 * (a.len() + c.len() + n + 1)) {
        // most violated inactive inequality
        let mut worst: Option<(usize, T)> = None;
        for i in 0..a.len() {
            if skipped[i] || act.kinds.contains(&Kind::Ineq(i)) {
                continue;
            }
            let s = b[i] - dot(&a[i], &x);
            if s < -viol_eps * scale_b && worst.is_none_or(|(_, ws)| s < ws) {
                worst = Some((i, s));
            }
        }
        let Some((p, _)) = worst else {
            return Ok(finish(x, &act, a.len(), c.len()));
        };
        if !add_constraint(&mut x, &mut act, Kind::Ineq(p), ineq_normal(p), -b[p], n, eps)? {
            skipped[p] = true;
        }
    }
    Err(Error::Numerical("projection active-set iteration limit".into()))
}

#[allow(clippy::too_many_arguments)]
fn add_constraint<T: Scalar>(
    x: &mut [T],
    act: &mut Active<T>,
    kind: Kind,
    np: Vec<T>,
    b0: T,
    n: usize,
    eps: T,
) -> Result<bool> {
    let mut up = T::zero();
    for _ in 0..(4 * n + 8 + act.kinds.len() * 4) {
        let q = act.normals.len();
        let (qm, r) = householder_qr(&act.normals, n);
        // d = Qᵀ n_p
        let dvec = qm.transpose().mul_vec(&np);
        let mut z = vec![T::zero(); n];
        for k in q..n {
            axpy(dvec[k], &qm.col(k), &mut z);
        }
        let rdir = if q > 0 { upper_solve(&r, &dvec[..q]) } else { Vec::new() };
        let s = dot(&np, x) - b0;
        let scale = norm(&np).max(T::one());
        let z_nonzero = norm(&z) > eps * scale;
        let t2 = if z_nonzero { Some(-s / dot(&z, &np)) } else { None };
        // partial step: the first active inequality whose multiplier reaches zero
        let mut t1: Option<(T, usize)> = None;
        for (k, kk) in act.kinds.iter().enumerate() {
            if matches!(kk, Kind::Ineq(_)) && rdir[k] > eps {
                let t = act.u[k] / rdir[k];
                if t1.is_none_or(|(tb, _)| t < tb) {
                    t1 = Some((t, k));
                }
            }
        }
        match (t1, t2) {
            (None, None) => {
                // The row is a combination of active rows; an L1 residual of τ spread over them
                // (the LP's feasibility test) can show up here as τ(1 + Σ|coefficients|).
                let spread = rdir.iter().fold(T::one(), |acc, r| acc + r.abs());
                if s.abs() <= Tol::<T>::current().tau * scale * spread {
                    return Ok(false);
                }
                return Err(Error::Domain("projection onto an empty polyhedron".into()));
            }
            (Some((t, l)), t2) if t2.is_none_or(|t2| t < t2) => {
                for k in 0..act.u.len() {
                    let rk = rdir[k];
                    act.u[k] -= t * rk;
                }
                up += t;
                if t2.is_some() {
                    axpy(t, &z, x);
                }
                act.kinds.remove(l);
                act.normals.remove(l);
                act.u.remove(l);
            }
            (_, Some(t)) => {
                axpy(t, &z, x);
                for k in 0..act.u.len() {
                    let rk = rdir[k];
                    act.u[k] -= t * rk;
                }
                up += t;
                act.kinds.push(kind);
                act.normals.push(np);
                act.u.push(up);
                return Ok(true);
            }
            (Some(_), None) => unreachable!(),
        }
    }
    Err(Error::Numerical("projection inner loop did not settle".into()))
}

fn finish<T: Scalar>(x: Vec<T>, act: &Active<T>, k: usize, e: usize) -> QpSolution<T> {
    let mut lambda = vec![T::zero(); k];
    let mut mu = vec![T::zero(); e];
    for (kind, u) in act.kinds.iter().zip(&act.u) {
        match *kind {
            Kind::Ineq(i) => lambda[i] = *u,
            Kind::Eq(j, flipped) => mu[j] = if flipped { *u } else { -*u },
        }
    }
    QpSolution { point: x, lambda, mu }
}

/// Residual of the optimality certificate `v - p - Aᵀλ - Cᵀμ` (should vanish).
pub fn certificate_residual<T: Scalar>(v: &[T], sol: &QpSolution<T>, a: &[Vec<T>], c: &[Vec<T>]) -> T {
    let mut r: Vec<T> = v.iter().zip(&sol.point).map(|(vi, pi)| *vi - *pi).collect();
    for (row, l) in a.iter().zip(&sol.lambda) {
        axpy(-*l, row, &mut r);
    }
    for (row, m) in c.iter().zip(&sol.mu) {
        axpy(-*m, row, &mut r);
    }
    norm(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nonnegative_orthant() {
        let a = vec![vec![-1.0, 0.0], vec![0.0, -1.0]];
        let b = vec![0.0, 0.0];
        let sol = project(&[-1.0, 2.0], &a, &b, &[], &[]).unwrap();
        assert_abs_diff_eq!(sol.point[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.point[1], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.lambda[0], 1.0, epsilon = 1e-14);
        assert!(certificate_residual(&[-1.0, 2.0], &sol, &a, &[]) < 1e-13);
    }

    #[test]
    fn degenerate_wedge() {
        // three constraints through the origin, point projects to the apex
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![1.0, 0.0]];
        let b = vec![0.0; 3];
        let v = [3.0, 0.5];
        let sol = project(&v, &a, &b, &[], &[]).unwrap();
        assert_abs_diff_eq!(sol.point[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.point[1], 0.0, epsilon = 1e-12);
        assert!(sol.lambda.iter().all(|l| *l >= -1e-12));
        assert!(certificate_residual(&v, &sol, &a, &[]) < 1e-12);
    }

    #[test]
    fn with_equalities_and_empty() {
        let c = vec![vec![1.0, 1.0]];
        let d = vec![1.0];
        let a = vec![vec![-1.0, 0.0]];
        let b = vec![0.0];
        let v = [-2.0, 0.0];
        let sol = project(&v, &a, &b, &c, &d).unwrap();
        assert_abs_diff_eq!(sol.point[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.point[1], 1.0, epsilon = 1e-12);
        assert!(certificate_residual(&v, &sol, &a, &c) < 1e-12);
        let a = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let b = vec![0.0, -1.0];
        assert!(project(&[0.0, 0.0], &a, &b, &[], &[]).is_err());
    }
}
