//! Outer limiting subgradients and level-set mappings `α ↦ {x : f(x) - ⟨v̄, x - x̄⟩ ≤ α}`.

use crate::coderivative::check_criterion;
use crate::error::{Error, Result};
use crate::geometry::{distance_to_union, tangent_cone, HPolyhedron};
use crate::linalg::{concat, dot, sub};
use crate::scalar::Scalar;
use crate::stratified::{stratify_union, StratifiedMapping, UNION_BUDGET};
use crate::tolerance::Tol;

use super::{dedup, slice_last, subdifferentials, PlFunction};

fn check_v<T: Scalar>(f: &PlFunction<T>, v: &[T]) -> Result<()> {
    if v.len() != f.n {
        return Err(Error::Schema(format!("v̄ has length {}, expected {}", v.len(), f.n)));
    }
    Ok(())
}

/// `∂^>_v̄ f(x̄)`: limits of subgradients at points `x → x̄` with `f(x) → f(x̄)` and
/// `f(x) > f(x̄) + ⟨v̄, x - x̄⟩`.
///
/// On a graph cell the gap `α - f(x̄) - ⟨v̄, x - x̄⟩` is linear and vanishes at `(x̄, f(x̄))`, so
/// the cell has points arbitrarily close to `(x̄, f(x̄))` with a positive gap iff some
/// generator of its tangent cone there increases the gap. Every such cell contributes its
/// (constant) subdifferential.
pub fn outer_limiting_subdifferential<T: Scalar>(f: &PlFunction<T>, x: &[T], v: &[T]) -> Result<Vec<HPolyhedron<T>>> {
    let fx = f.checked_value(x)?;
    check_v(f, v)?;
    let e = f.profile_mapping()?;
    let r = e.refine(&HPolyhedron::full(f.n))?;
    let z = concat(x, &[fx]);
    let gap: Vec<T> = concat(&v.iter().map(|c| -*c).collect::<Vec<_>>(), &[T::one()]);
    let tol = Tol::<T>::current();
    let mut out = Vec::new();
    for c in r.adjacent(&z) {
        let cell = &r.cells[c];
        // only graph points (x, f(x)) count
        if (cell.point[f.n] - f.value(&cell.point[..f.n])).abs() > tol.rel(cell.point[f.n].abs()) {
            continue;
        }
        let g = tangent_cone(&cell.closure, &z)?.generators().clone();
        let rises = g.rays.iter().any(|d| dot(&gap, d) > tol.tau) || g.lineality.iter().any(|d| dot(&gap, d).abs() > tol.tau);
        if !rises {
            continue;
        }
        for k in &r.limiting(c).pieces {
            let s = slice_last(k, -T::one())?;
            if !s.is_empty() {
                out.push(s);
            }
        }
    }
    Ok(dedup(out))
}

/// The level-set mapping `α ↦ {x : f(x) - ⟨v̄, x - x̄⟩ ≤ α}` with input `α ∈ ℝ`.
pub fn level_set_mapping<T: Scalar>(f: &PlFunction<T>, x: &[T], v: &[T]) -> Result<StratifiedMapping<T>> {
    check_v(f, v)?;
    let shift = dot(v, x);
    let pieces = f
        .cells
        .iter()
        .map(|c| {
            let z = [T::zero()];
            let mut a: Vec<Vec<T>> = c.set.a().iter().map(|r| concat(&z, r)).collect();
            let mut b = c.set.b().to_vec();
            // ⟨g - v̄, x⟩ + c + ⟨v̄, x̄⟩ - α ≤ 0
            a.push(concat(&[-T::one()], &sub(&c.g, v)));
            b.push(-(c.c + shift));
            HPolyhedron::new(f.n + 1, a, b, c.set.c().iter().map(|r| concat(&z, r)).collect(), c.set.d().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    stratify_union(1, &pieces, UNION_BUDGET)
}

#[derive(Clone, Debug)]
pub struct LevelSetReport<T> {
    /// `∂^>_v̄ f(x̄)`.
    pub outer: Vec<HPolyhedron<T>>,
    /// `∂f(x̄)`.
    pub basic: Vec<HPolyhedron<T>>,
    /// Lipschitz-like relative to `{α ≥ f(x̄)}`, i.e. `v̄ ∉ ∂^>_v̄ f(x̄)`.
    pub relative_llp: bool,
    /// `1 / d(v̄, ∂^>_v̄ f(x̄))`.
    pub lip_x: T,
    /// `1 / d(v̄, ∂f(x̄))`.
    pub classical_lip: T,
    /// The relative modulus computed from the projectional coderivative of the level-set
    /// mapping itself.
    pub coderivative_lip_x: T,
}

fn reciprocal<T: Scalar>(d: T) -> T {
    if d <= Tol::<T>::current().tau {
        T::infinity()
    } else {
        T::one() / d
    }
}

/// Relative and classical Lipschitz-like moduli of the level-set mapping at `f(x̄)` for `x̄`,
/// relative to the half-line `{α ≥ f(x̄)}`.
pub fn level_set_analysis<T: Scalar>(f: &PlFunction<T>, x: &[T], v: &[T]) -> Result<LevelSetReport<T>> {
    let fx = f.checked_value(x)?;
    let outer = outer_limiting_subdifferential(f, x, v)?;
    let (basic, _) = subdifferentials(f, x)?;
    // d(v̄, ∅) = +∞ gives modulus 0
    let d_outer = if outer.is_empty() { T::infinity() } else { distance_to_union(v, &outer)? };
    let lip_x = if d_outer.is_infinite() { T::zero() } else { reciprocal(d_outer) };
    let classical_lip = reciprocal(distance_to_union(v, &basic)?);
    let s = level_set_mapping(f, x, v)?;
    let half_line = HPolyhedron::inequalities(1, vec![vec![-T::one()]], vec![-fx])?;
    let coderivative_lip_x = check_criterion(&s, &half_line, &[fx], x)?.modulus;
    let agree = if lip_x.is_finite() && coderivative_lip_x.is_finite() {
        (lip_x - coderivative_lip_x).abs() <= T::of(1e3) * Tol::<T>::current().rel(lip_x)
    } else {
        lip_x.is_finite() == coderivative_lip_x.is_finite()
    };
    if !agree {
        return Err(Error::Numerical(format!(
            "structural subgradients give {lip_x}, the level-set coderivative gives {coderivative_lip_x}"
        )));
    }
    let relative_llp = !outer.iter().any(|p| p.contains(v));
    Ok(LevelSetReport { relative_llp, outer, basic, lip_x, classical_lip, coderivative_lip_x })
}
