//! Projectional subgradients relative to a convex polyhedron and the relative Lipschitz
//! modulus they determine.

use std::collections::BTreeMap;

use crate::coderivative::{check_criterion, projection_regions};
use crate::error::{Error, Result};
use crate::geometry::{ConeUnion, HPolyhedron, PolyCone};
use crate::scalar::Scalar;
use crate::tolerance::Tol;

use super::{dedup, max_norm, outer_limiting_subdifferential, project_onto_regions, slice_last, subdifferentials, PlFunction};

/// `∂_X f(x̄)` as a union of polyhedra and `∂^∞_X f(x̄)` as a union of cones.
///
/// A cell `c` of `epi(f + δ_X)` adjacent to `(x̄, f(x̄))` fixes `T_X(x)` for its points; every
/// cell `c'` whose closure contains `c` contributes the subgradients read off its regular
/// normal cone. Those are projected onto `T_X` region by region. The horizon part collects
/// the recession cones of the projected pieces.
pub fn projectional_subdifferentials<T: Scalar>(
    f: &PlFunction<T>,
    x_set: &HPolyhedron<T>,
    x: &[T],
) -> Result<(Vec<HPolyhedron<T>>, ConeUnion<T>)> {
    let fx = f.checked_value(x)?;
    if !x_set.contains(x) {
        return Err(Error::Domain("x̄ is not in X".into()));
    }
    let e = f.profile_mapping()?;
    let r = e.refine(x_set)?;
    let mut z = x.to_vec();
    z.push(fx);
    let mut by_face: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for c in r.adjacent(&z) {
        let above = by_face.entry(r.cells[c].x_active.clone()).or_default();
        for c2 in r.above(c) {
            if !above.contains(&c2) {
                above.push(c2);
            }
        }
    }
    let mut pieces = Vec::new();
    for (face, above) in by_face {
        let c = r.cells.iter().find(|c| c.x_active == face).expect("face has a cell");
        let regions = projection_regions(&c.tangent)?;
        for c2 in above {
            let s = slice_last(&r.cells[c2].regular, -T::one())?;
            if s.is_empty() {
                continue;
            }
            pieces.extend(project_onto_regions(&s, &regions)?);
        }
    }
    let pieces = dedup(pieces);
    let horizon = ConeUnion::new(f.n, pieces.iter().map(|p| PolyCone::from_h(f.n, p.a().to_vec(), p.c().to_vec())).collect()).pruned();
    Ok((pieces, horizon))
}

#[derive(Clone, Debug)]
pub struct RelativeLip<T> {
    /// `max ‖v‖` over `∂_X f(x̄)`, or `+∞` when `∂^∞_X f(x̄) ≠ {0}`.
    pub modulus: T,
    /// Norm-maximising subgradient, or a recession direction when the modulus is infinite.
    pub witness: Option<Vec<T>>,
    /// Outer norm of the projectional coderivative of the profile mapping.
    pub profile_modulus: T,
    pub horizon_trivial: bool,
    pub subgradients: Vec<HPolyhedron<T>>,
    pub horizon: ConeUnion<T>,
}

impl<T: Scalar> RelativeLip<T> {
    pub fn lipschitz(&self) -> bool {
        self.modulus.is_finite()
    }
}

/// `lip_X f(x̄)` from the projectional subgradients, checked against the profile-mapping route.
///
/// Points of `X` outside `dom f` near `x̄` make the modulus `+∞`; both routes detect this
/// through the vertical part of `epi(f + δ_X)`.
pub fn relative_lip_modulus<T: Scalar>(f: &PlFunction<T>, x_set: &HPolyhedron<T>, x: &[T]) -> Result<RelativeLip<T>> {
    let (subgradients, horizon) = projectional_subdifferentials(f, x_set, x)?;
    let horizon_trivial = horizon.is_zero();
    let (modulus, witness) = if horizon_trivial {
        max_norm(&subgradients)
    } else {
        let dir = horizon.pieces.iter().find(|k| !k.is_zero()).and_then(|k| {
            let g = k.generators();
            g.rays.first().or(g.lineality.first()).cloned()
        });
        (T::infinity(), dir)
    };
    let fx = f.value(x);
    let profile = check_criterion(&f.profile_mapping()?, x_set, x, &[fx])?;
    let agree = if modulus.is_finite() && profile.modulus.is_finite() {
        (modulus - profile.modulus).abs() <= T::of(1e3) * Tol::<T>::current().rel(modulus)
    } else {
        modulus.is_finite() == profile.modulus.is_finite()
    };
    if !agree {
        return Err(Error::Numerical(format!(
            "subgradient route gives {modulus}, profile mapping route gives {}",
            profile.modulus
        )));
    }
    Ok(RelativeLip { modulus, witness, profile_modulus: profile.modulus, horizon_trivial, subgradients, horizon })
}

/// All subgradient sets of `f` at `x̄` in one place.
#[derive(Clone, Debug)]
pub struct SubdiffReport<T> {
    pub basic: Vec<HPolyhedron<T>>,
    pub horizon: ConeUnion<T>,
    pub projectional: Vec<HPolyhedron<T>>,
    pub projectional_horizon: ConeUnion<T>,
    /// Present when a reference vector `v̄` was supplied.
    pub outer_limiting_v: Option<Vec<HPolyhedron<T>>>,
}

pub fn subdiff_report<T: Scalar>(
    f: &PlFunction<T>,
    x_set: &HPolyhedron<T>,
    x: &[T],
    v: Option<&[T]>,
) -> Result<SubdiffReport<T>> {
    let (basic, horizon) = subdifferentials(f, x)?;
    let (projectional, projectional_horizon) = projectional_subdifferentials(f, x_set, x)?;
    let outer_limiting_v = match v {
        Some(v) => Some(outer_limiting_subdifferential(f, x, v)?),
        None => None,
    };
    Ok(SubdiffReport { basic, horizon, projectional, projectional_horizon, outer_limiting_v })
}
