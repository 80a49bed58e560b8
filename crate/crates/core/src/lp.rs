//! Dense two-phase simplex for `max cᵀx  s.t.  A x ≤ b,  C x = d` with `x` free.
//!
//! Bland's rule keeps it finite on degenerate problems, which are the norm here
//! (cones, faces, tight rows everywhere).

use crate::linalg::dot;
use crate::scalar::Scalar;
use crate::tolerance::Tol;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Unbounded,
    Infeasible,
}

impl<T> LpOutcome<T> {
    pub fn point(&self) -> Option<&Vec<T>> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

pub struct Lp<'a, T> {
    pub n: usize,
    pub a: &'a [Vec<T>],
    pub b: &'a [T],
    pub c: &'a [Vec<T>],
    pub d: &'a [T],
}

struct Tableau<T> {
    m: Vec<Vec<T>>, // rows x (cols + 1), last column is rhs
    basis: Vec<usize>,
    cols: usize,
    eps: T,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.m[r][col];
        for v in self.m[r].iter_mut() {
            *v /= p;
        }
        let prow = self.m[r].clone();
        for (i, row) in self.m.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f == T::zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= f * *pv;
            }
            row[col] = T::zero();
        }
        self.basis[r] = col;
    }

    /// Maximises `obj · z` over the current tableau restricted to columns `< limit`.
    /// Returns `false` on unboundedness.
    fn optimise(&mut self, obj: &[T], limit: usize) -> bool {
        let rhs = self.cols;
        for _ in 0..10_000 {
            // reduced costs r_j = obj_j - Σ obj_{basis_i} m[i][j]
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let z: T = self.m.iter().zip(&self.basis).map(|(row, &bi)| obj[bi] * row[j]).sum();
                if obj[j] - z > self.eps {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else { return true };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.m.iter().enumerate() {
                if row[col] > self.eps {
                    let ratio = row[rhs] / row[col];
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - self.eps
                                || ((ratio - lr).abs() <= self.eps && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, col);
        }
        true
    }
}

impl<'a, T: Scalar> Lp<'a, T> {
    pub fn new(n: usize, a: &'a [Vec<T>], b: &'a [T], c: &'a [Vec<T>], d: &'a [T]) -> Self {
        Lp { n, a, b, c, d }
    }

    pub fn maximize(&self, obj: &[T]) -> LpOutcome<T> {
        let n = self.n;
        let k = self.a.len();
        let e = self.c.len();
        let rows = k + e;
        // columns: x+ (n), x- (n), slack (k), artificial (rows)
        let nstd = 2 * n + k;
        let cols = nstd + rows;
        let eps = (Tol::<T>::current().tau * T::of(1e-2)).max(T::epsilon() * T::of(100.0));
        let mut m = vec![vec![T::zero(); cols + 1]; rows];
        for i in 0..rows {
            let (coef, rhs) = if i < k { (&self.a[i], self.b[i]) } else { (&self.c[i - k], self.d[i - k]) };
            let sign = if rhs < T::zero() { -T::one() } else { T::one() };
            for j in 0..n {
                m[i][j] = sign * coef[j];
                m[i][n + j] = -sign * coef[j];
            }
            if i < k {
                m[i][2 * n + i] = sign;
            }
            m[i][nstd + i] = T::one();
            m[i][cols] = sign * rhs;
        }
        let mut tab = Tableau { m, basis: (nstd..cols).collect(), cols, eps };
        let mut phase1 = vec![T::zero(); cols];
        for v in phase1.iter_mut().skip(nstd) {
            *v = -T::one();
        }
        tab.optimise(&phase1, cols);
        let infeas: T = tab
            .basis
            .iter()
            .zip(&tab.m)
            .filter(|(&bi, _)| bi >= nstd)
            .map(|(_, row)| row[cols])
            .sum();
        let scale = self.b.iter().chain(self.d).fold(T::one(), |s, v| s.max(v.abs()));
        if infeas > Tol::<T>::current().tau * scale {
            return LpOutcome::Infeasible;
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.m.len() {
            if tab.basis[r] >= nstd {
                let col = (0..nstd).find(|&j| tab.m[r][j].abs() > eps);
                match col {
                    Some(j) => tab.pivot(r, j),
                    None => {
                        tab.m.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        let mut phase2 = vec![T::zero(); cols];
        for j in 0..n {
            phase2[j] = obj[j];
            phase2[n + j] = -obj[j];
        }
        if !tab.optimise(&phase2, nstd) {
            return LpOutcome::Unbounded;
        }
        let mut z = vec![T::zero(); cols];
        for (row, &bi) in tab.m.iter().zip(&tab.basis) {
            z[bi] = row[cols];
        }
        let x: Vec<T> = (0..n).map(|j| z[j] - z[n + j]).collect();
        let value = dot(obj, &x);
        LpOutcome::Optimal { x, value }
    }

    /// Some feasible point, if any.
    pub fn feasible_point(&self) -> Option<Vec<T>> {
        match self.maximize(&vec![T::zero(); self.n]) {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}
