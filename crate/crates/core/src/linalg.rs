//! Small dense linear algebra over [`Scalar`].
//!
//! Sizes in this crate are tiny (a handful of dimensions, tens of rows), so everything is
//! straightforward row-major code with explicit rank thresholds.

use crate::scalar::Scalar;

pub type Vector<T> = Vec<T>;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn norm_inf<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn scale<T: Scalar>(s: T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| s * *x).collect()
}

/// `y += s * x`
pub fn axpy<T: Scalar>(s: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * *xi;
    }
}

pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum::<T>().sqrt()
}

/// Unit vector in the direction of `a`, or `None` when `‖a‖ <= eps`.
pub fn normalized<T: Scalar>(a: &[T], eps: T) -> Option<Vec<T>> {
    let n = norm(a);
    if n <= eps {
        None
    } else {
        Some(scale(T::one() / n, a))
    }
}

pub fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut e = vec![T::zero(); n];
    e[i] = T::one();
    e
}

pub fn concat<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(rows: &[Vec<T>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend_from_slice(r);
        }
        Mat { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors of length `n`.
    pub fn from_cols(cols: &[Vec<T>], n: usize) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ v`
    pub fn tmul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len());
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            axpy(v[i], self.row(i), &mut out);
        }
        out
    }

    pub fn scaled(&self, s: T) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| *x * s).collect() }
    }

    pub fn sub_mat(&self, other: &Mat<T>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    /// Horizontal concatenation `[self other]`.
    pub fn hcat(&self, other: &Mat<T>) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }

    pub fn max_abs(&self) -> T {
        norm_inf(&self.data)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Orthonormal basis of `span(vectors)` by modified Gram-Schmidt with one re-orthogonalisation
/// pass. Vectors whose residual falls below `eps * max(1, ‖v‖)` are treated as dependent.
pub fn orthonormal_span<T: Scalar>(vectors: &[Vec<T>], eps: T) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let scale_v = norm(v).max(T::one());
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                axpy(-c, b, &mut r);
            }
        }
        if let Some(u) = normalized(&r, eps * scale_v) {
            basis.push(u);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(basis)` in `ℝⁿ`;
/// `basis` must already be orthonormal.
pub fn complement<T: Scalar>(basis: &[Vec<T>], n: usize, eps: T) -> Vec<Vec<T>> {
    let mut all = basis.to_vec();
    let k = all.len();
    while all.len() < n {
        // Greedily take the canonical vector with the largest residual; it is at least
        // 1/sqrt(n) while the complement is nontrivial, so the result stays well conditioned.
        let mut best: Option<(T, Vec<T>)> = None;
        for i in 0..n {
            let mut r = unit::<T>(n, i);
            for _ in 0..2 {
                for b in &all {
                    let c = dot(&r, b);
                    axpy(-c, b, &mut r);
                }
            }
            let nr = norm(&r);
            if best.as_ref().is_none_or(|(bn, _)| nr > *bn) {
                best = Some((nr, r));
            }
        }
        match best {
            Some((nr, r)) if nr > eps.max(T::of(1e-3)) => all.push(scale(T::one() / nr, &r)),
            _ => break,
        }
    }
    all.split_off(k)
}

/// Orthonormal basis of `{x : r·x = 0 for every row r}`.
pub fn null_space<T: Scalar>(rows: &[Vec<T>], n: usize, eps: T) -> Vec<Vec<T>> {
    let span = orthonormal_span(rows, eps);
    complement(&span, n, eps)
}

pub fn rank<T: Scalar>(rows: &[Vec<T>], eps: T) -> usize {
    orthonormal_span(rows, eps).len()
}

/// Orthogonal projection of `v` onto `span(basis)` for an orthonormal `basis`.
pub fn project_onto_span<T: Scalar>(basis: &[Vec<T>], v: &[T]) -> Vec<T> {
    let mut p = vec![T::zero(); v.len()];
    for b in basis {
        axpy(dot(v, b), b, &mut p);
    }
    p
}

/// Projector matrix onto `span(basis)` (orthonormal basis in `ℝⁿ`).
pub fn projector<T: Scalar>(basis: &[Vec<T>], n: usize) -> Mat<T> {
    let mut p = Mat::zeros(n, n);
    for b in basis {
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += b[i] * b[j];
            }
        }
    }
    p
}

/// Solves the square system `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Scalar>(a: &Mat<T>, b: &[T], eps: T) -> Option<Vec<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .fold((k, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv <= eps {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            rhs.swap(k, p);
        }
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let t = m[(k, j)];
                m[(i, j)] -= f * t;
            }
            let t = rhs[k];
            rhs[i] -= f * t;
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let s: T = (k + 1..n).map(|j| m[(k, j)] * x[j]).sum();
        x[k] = (rhs[k] - s) / m[(k, k)];
    }
    Some(x)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky<T: Scalar>(a: &Mat<T>, eps: T) -> Option<Mat<T>> {
    let n = a.nrows();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let s: T = (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum();
        let d = a[(j, j)] - s;
        if d <= eps {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let s: T = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            l[(i, j)] = (a[(i, j)] - s) / djj;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse<T: Scalar>(l: &Mat<T>) -> Mat<T> {
    let n = l.nrows();
    let mut inv = Mat::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = T::one() / l[(j, j)];
        for i in j + 1..n {
            let s: T = (j..i).map(|k| l[(i, k)] * inv[(k, j)]).sum();
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal eigenvectors.
pub fn sym_eigen<T: Scalar>(a: &Mat<T>) -> (Vec<T>, Vec<Vec<T>>) {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            let s = (m[(i, j)] + m[(j, i)]) / T::of(2.0);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    let mut v = Mat::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let diag: T = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= eps * eps * diag.max(T::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut pairs: Vec<(T, Vec<T>)> = (0..n).map(|i| (m[(i, i)], v.col(i))).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    pairs.into_iter().unzip()
}

/// Householder QR of the `n × q` matrix whose columns are `cols`.
///
/// Returns the full orthogonal `Q` (`n × n`) and the upper-triangular `R` (`q × q` block).
pub fn householder_qr<T: Scalar>(cols: &[Vec<T>], n: usize) -> (Mat<T>, Mat<T>) {
    let q = cols.len();
    let mut r = Mat::from_cols(cols, n);
    let mut qm = Mat::identity(n);
    for k in 0..q.min(n) {
        let x: Vec<T> = (k..n).map(|i| r[(i, k)]).collect();
        let nx = norm(&x);
        if nx == T::zero() {
            continue;
        }
        let alpha = if x[0] > T::zero() { -nx } else { nx };
        let mut v = x;
        v[0] -= alpha;
        let Some(v) = normalized(&v, T::zero()) else { continue };
        for j in 0..q {
            let s: T = (k..n).map(|i| v[i - k] * r[(i, j)]).sum();
            for i in k..n {
                r[(i, j)] -= T::of(2.0) * s * v[i - k];
            }
        }
        for i in 0..n {
            let s: T = (k..n).map(|l| qm[(i, l)] * v[l - k]).sum();
            for l in k..n {
                qm[(i, l)] -= T::of(2.0) * s * v[l - k];
            }
        }
    }
    let mut rr = Mat::zeros(q, q);
    for i in 0..q.min(n) {
        for j in i..q {
            rr[(i, j)] = r[(i, j)];
        }
    }
    (qm, rr)
}

/// Solves `r x = b` for upper-triangular `r`.
pub fn upper_solve<T: Scalar>(r: &Mat<T>, b: &[T]) -> Vec<T> {
    let n = r.nrows();
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let s: T = (k + 1..n).map(|j| r[(k, j)] * x[j]).sum();
        x[k] = (b[k] - s) / r[(k, k)];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jacobi_matches_closed_form_2x2() {
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]], 2);
        let (vals, vecs) = sym_eigen(&a);
        assert_abs_diff_eq!(vals[0], (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], (3.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        let av = a.mul_vec(&vecs[0]);
        for i in 0..2 {
            assert_abs_diff_eq!(av[i], vals[0] * vecs[0][i], epsilon = 1e-13);
        }
    }

    #[test]
    fn null_space_is_orthogonal_to_rows() {
        let rows = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]];
        let ns = null_space(&rows, 3, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert_abs_diff_eq!(dot(v, &rows[0]), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cholesky_and_triangular_inverse() {
        let a = Mat::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]], 2);
        let l = cholesky(&a, 1e-12).unwrap();
        let llt = l.mul(&l.transpose());
        assert_abs_diff_eq!(llt.sub_mat(&a).max_abs(), 0.0, epsilon = 1e-14);
        let li = lower_inverse(&l);
        let id = li.mul(&l);
        assert_abs_diff_eq!(id.sub_mat(&Mat::identity(2)).max_abs(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn householder_reconstructs() {
        let cols = vec![vec![1.0, 2.0, 2.0], vec![0.0, 1.0, 3.0]];
        let (q, r) = householder_qr(&cols, 3);
        let qtq = q.transpose().mul(&q);
        assert_abs_diff_eq!(qtq.sub_mat(&Mat::identity(3)).max_abs(), 0.0, epsilon = 1e-14);
        for j in 0..2 {
            for i in 0..3 {
                let v: f64 = (0..2).map(|k| q[(i, k)] * r[(k, j)]).sum();
                assert_abs_diff_eq!(v, cols[j][i], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn gaussian_solve() {
        let a = Mat::from_rows(&[vec![0.0, 1.0], vec![2.0, 1.0]], 2);
        let x = solve(&a, &[1.0, 3.0], 1e-12).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-14);
        let sing = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], 2);
        assert!(solve(&sing, &[1.0, 1.0], 1e-12).is_none());
    }
}
