use crate::error::{Error, Result};
use crate::geometry::{HPolyhedron, PolyCone};
use crate::linalg::norm;
use crate::scalar::Scalar;
use crate::stratified::StratifiedMapping;
use crate::tolerance::Tol;

use super::{outer_norm, projectional_from_refinement, PhMap};

#[derive(Clone, Debug)]
pub struct StratumKappa<T> {
    pub label: String,
    pub kappa: T,
}

#[derive(Clone, Debug)]
pub struct CriterionReport<T> {
    /// `D*_X S(x̄|ū)(0) = {0}`.
    pub holds: bool,
    /// `(x*, u*)` with `u* = 0` and `x* ≠ 0` on the graph of the projectional coderivative.
    pub kernel_witness: Option<(Vec<T>, Vec<T>)>,
    /// Outer norm of the projectional coderivative, `+∞` when the criterion fails.
    pub modulus: T,
    /// `(u*, x*)` attaining the modulus.
    pub witness: Option<(Vec<T>, Vec<T>)>,
    pub per_stratum: Vec<StratumKappa<T>>,
    pub coderivative: PhMap<T>,
}

/// Nonzero `x*` with `(0, x*)` in the graph, found by slicing each graph cone with `u* = 0`.
pub fn kernel_of<T: Scalar>(h: &PhMap<T>) -> Option<Vec<T>> {
    let tol = Tol::<T>::current();
    for piece in &h.pieces {
        let g = piece.graph_cone();
        let fix_u: Vec<Vec<T>> = (0..h.m)
            .map(|j| {
                let mut r = vec![T::zero(); h.m + h.n];
                r[j] = T::one();
                r
            })
            .collect();
        let (a, c) = g.h();
        let sliced = PolyCone::from_h(h.m + h.n, a.clone(), c.iter().cloned().chain(fix_u).collect());
        let gens = sliced.generators();
        for v in gens.rays.iter().chain(&gens.lineality) {
            let x = &v[h.m..];
            if norm(x) > T::of(1e3) * tol.tau {
                return Some(x.to_vec());
            }
        }
    }
    None
}

/// Decides `D*_X S(x̄|ū)(0) = {0}` and computes `|D*_X S(x̄|ū)|⁺` together with one value per
/// stratum adjacent to `(x̄, ū)`.
///
/// The kernel test slices graph cones; the modulus comes from the parameter cones. The two
/// must agree on finiteness, otherwise a numerical error is reported.
pub fn check_criterion<T: Scalar>(
    s: &StratifiedMapping<T>,
    x_set: &HPolyhedron<T>,
    x: &[T],
    u: &[T],
) -> Result<CriterionReport<T>> {
    let refinement = s.refine(x_set)?;
    let h = projectional_from_refinement(s, &refinement, x, u)?;
    let kernel = kernel_of(&h);
    let outer = outer_norm(&h)?;
    let holds = kernel.is_none();
    if holds != outer.value.is_finite() {
        return Err(Error::Numerical(format!(
            "kernel test ({}) disagrees with the outer norm ({})",
            if holds { "trivial" } else { "nontrivial" },
            outer.value
        )));
    }
    let mut tags: Vec<usize> = h.pieces.iter().flat_map(|p| p.tags.iter().copied()).collect();
    tags.sort_unstable();
    tags.dedup();
    let mut per_stratum = Vec::new();
    for t in tags {
        let kappa = outer_norm(&h.restricted_to(t))?.value;
        per_stratum.push(StratumKappa { label: s.strata[t].label.clone(), kappa });
    }
    Ok(CriterionReport {
        holds,
        kernel_witness: kernel.map(|xs| (xs, vec![T::zero(); s.m])),
        modulus: outer.value,
        witness: outer.witness,
        per_stratum,
        coderivative: h,
    })
}
