//! Closed forms for the projectional coderivative of a smooth map relative to an affine set
//! or a half-space, at a boundary point, given its Jacobian `J` (`m × n`, by rows).

use crate::error::{Error, Result};
use crate::geometry::PolyCone;
use crate::linalg::{concat, dot, norm, null_space, projector, scale, Mat};
use crate::scalar::Scalar;
use crate::tolerance::Tol;

use super::{PhMap, PhPiece};

#[derive(Clone, Debug)]
pub enum SmoothSet<T> {
    /// `{x : B x = b}`.
    Affine { b_rows: Vec<Vec<T>>, b: Vec<T> },
    /// `{x : ⟨a, x⟩ ≤ β}`.
    Halfspace { a: Vec<T>, beta: T },
}

/// One value `D*_X F(x̄)(y)`.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothValue<T> {
    Point(Vec<T>),
    /// The closed segment between the two points.
    Segment(Vec<T>, Vec<T>),
    TwoPoints(Vec<T>, Vec<T>),
}

fn transpose_rows<T: Scalar>(j: &[Vec<T>], n: usize) -> Result<Mat<T>> {
    if j.is_empty() || j.iter().any(|r| r.len() != n) {
        return Err(Error::Schema("Jacobian rows must be nonempty and of equal length".into()));
    }
    Ok(Mat::from_rows(j, n).transpose())
}

fn check_boundary<T: Scalar>(set: &SmoothSet<T>, x: &[T]) -> Result<()> {
    let tol = Tol::<T>::current();
    match set {
        SmoothSet::Affine { b_rows, b } => {
            if b_rows.len() != b.len() || b_rows.iter().any(|r| r.len() != x.len()) {
                return Err(Error::Schema("affine set rows do not match x̄".into()));
            }
            if b_rows.iter().zip(b).any(|(r, v)| (dot(r, x) - *v).abs() > tol.rel(v.abs())) {
                return Err(Error::Domain("x̄ is not in the affine set".into()));
            }
        }
        SmoothSet::Halfspace { a, beta } => {
            if a.len() != x.len() {
                return Err(Error::Schema("half-space normal does not match x̄".into()));
            }
            if dot(a, a) == T::zero() {
                return Err(Error::Schema("half-space normal is zero".into()));
            }
            if (dot(a, x) - *beta).abs() > tol.rel(beta.abs()) {
                return Err(Error::Domain("x̄ is not on the boundary of the half-space".into()));
            }
        }
    }
    Ok(())
}

/// `Π_{ker B}` for `B` given by rows in `ℝⁿ`.
fn kernel_projector<T: Scalar>(b_rows: &[Vec<T>], n: usize) -> Mat<T> {
    let eps = Tol::<T>::current().tau;
    projector(&null_space(b_rows, n, eps), n)
}

/// `D*_X F(x̄)` as a positively homogeneous map `ℝᵐ ⇉ ℝⁿ`.
///
/// Affine `X`: `y ↦ Π_{ker B} Jᵀ y`. Half-space `X`: the segment `[Jᵀy, proj_{a^⊥} Jᵀy]` when
/// `⟨Jᵀy, a⟩ ≤ 0` and the pair of its endpoints otherwise.
pub fn smooth_projectional_coderivative<T: Scalar>(j: &[Vec<T>], set: &SmoothSet<T>, x: &[T]) -> Result<PhMap<T>> {
    let n = x.len();
    let m = j.len();
    let jt = transpose_rows(j, n)?;
    check_boundary(set, x)?;
    let eye = Mat::<T>::identity(m).row_vecs();
    match set {
        SmoothSet::Affine { b_rows, .. } => {
            let p = kernel_projector(b_rows, n).mul(&jt);
            Ok(PhMap::new(m, n, vec![PhPiece::new(PolyCone::whole(m), eye, p.row_vecs())]))
        }
        SmoothSet::Halfspace { a, .. } => {
            let aa = dot(a, a);
            // ⟨Jᵀy, a⟩ = ⟨y, J a⟩
            let ja = jt.tmul_vec(a);
            let interior = PhPiece::new(PolyCone::whole(m), eye.clone(), jt.row_vecs());
            let proj = Mat::<T>::identity(n).sub_mat(&projector(&[scale(T::one() / norm(a), a)], n)).mul(&jt);
            let projected =
                PhPiece::new(PolyCone::from_h(m, vec![ja.iter().map(|v| -*v).collect()], vec![]), eye.clone(), proj.row_vecs());
            // (y, s): x* = Jᵀy + s a with s ≥ 0 and ⟨y, Ja⟩ + ‖a‖² s ≤ 0
            let mut last = vec![T::zero(); m];
            last.push(-T::one());
            let seg_cone = PolyCone::from_h(m + 1, vec![concat(&ja, &[aa]), last], vec![]);
            let seg_u = eye.iter().map(|r| concat(r, &[T::zero()])).collect();
            let seg_x = jt.row_vecs().iter().zip(a).map(|(r, ai)| concat(r, &[*ai])).collect();
            let segment = PhPiece::new(seg_cone, seg_u, seg_x);
            Ok(PhMap::new(m, n, vec![interior, projected, segment]))
        }
    }
}

/// `D*_X F(x̄)(y)` evaluated directly.
pub fn smooth_projectional_value<T: Scalar>(j: &[Vec<T>], set: &SmoothSet<T>, x: &[T], y: &[T]) -> Result<SmoothValue<T>> {
    let n = x.len();
    let jt = transpose_rows(j, n)?;
    check_boundary(set, x)?;
    if y.len() != j.len() {
        return Err(Error::Schema(format!("y has length {}, expected {}", y.len(), j.len())));
    }
    let v = jt.mul_vec(y);
    match set {
        SmoothSet::Affine { b_rows, .. } => Ok(SmoothValue::Point(kernel_projector(b_rows, n).mul_vec(&v))),
        SmoothSet::Halfspace { a, .. } => {
            let tol = Tol::<T>::current();
            let aa = dot(a, a);
            let t = dot(&v, a);
            let scale = (dot(&v, &v) * aa).sqrt();
            if t.abs() <= tol.rel(scale) {
                return Ok(SmoothValue::Point(v));
            }
            let p: Vec<T> = v.iter().zip(a).map(|(vi, ai)| *vi - t / aa * *ai).collect();
            if t < T::zero() {
                Ok(SmoothValue::Segment(v, p))
            } else {
                Ok(SmoothValue::TwoPoints(v, p))
            }
        }
    }
}
