//! Coderivatives of stratified mappings, the projectional coderivative relative to a convex
//! polyhedral set, outer norms and the criterion built on them.
//!
//! Sign convention: `x* ∈ D*S(x̄|ū)(u*)` iff `(x*, -u*)` lies in the normal cone of the graph.

mod checks;
mod criterion;
mod directional;
mod outer;
mod smooth;

pub use checks::{neighborhood_necessity_check, neighborhood_sufficiency_check, CheckOutcome, Violation};
pub use criterion::{check_criterion, kernel_of, CriterionReport, StratumKappa};
pub use directional::{directional_coderivative, directional_sufficiency_check, DirectionalReport, FailingDirection};
pub use outer::{outer_norm, OuterNorm};
pub use smooth::{smooth_projectional_coderivative, smooth_projectional_value, SmoothSet, SmoothValue};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{ConeUnion, HPolyhedron, PolyCone, VRep, FACE_BUDGET};
use crate::linalg::{concat, dot, projector, Mat};
use crate::scalar::Scalar;
use crate::stratified::{Refinement, StratifiedMapping};

/// One conic piece `{(Q y, P y) : y ∈ C}` of a positively homogeneous map's graph.
#[derive(Clone, Debug)]
pub struct PhPiece<T> {
    pub param: PolyCone<T>,
    /// `Q`, rows of length `p`: the input `u* = Q y`.
    pub map_u: Vec<Vec<T>>,
    /// `P`, rows of length `p`: the output `x* = P y`.
    pub map_x: Vec<Vec<T>>,
    /// Strata this piece stems from (indices into the mapping's strata).
    pub tags: Vec<usize>,
}

impl<T: Scalar> PhPiece<T> {
    pub fn new(param: PolyCone<T>, map_u: Vec<Vec<T>>, map_x: Vec<Vec<T>>) -> Self {
        PhPiece { param, map_u, map_x, tags: Vec::new() }
    }

    fn apply(rows: &[Vec<T>], y: &[T]) -> Vec<T> {
        rows.iter().map(|r| dot(r, y)).collect()
    }

    pub fn input(&self, y: &[T]) -> Vec<T> {
        Self::apply(&self.map_u, y)
    }

    pub fn output(&self, y: &[T]) -> Vec<T> {
        Self::apply(&self.map_x, y)
    }

    /// The piece's graph cone in `(u*, x*)` coordinates.
    pub fn graph_cone(&self) -> PolyCone<T> {
        let rows: Vec<Vec<T>> = self.map_u.iter().chain(&self.map_x).cloned().collect();
        self.param.image(&rows)
    }
}

/// Positively homogeneous set-valued map `ℝᵐ ⇉ ℝⁿ`, `u* ↦ x*`, given by its conic graph.
#[derive(Clone, Debug)]
pub struct PhMap<T> {
    /// Input dimension (`u*`).
    pub m: usize,
    /// Output dimension (`x*`).
    pub n: usize,
    pub pieces: Vec<PhPiece<T>>,
}

impl<T: Scalar> PhMap<T> {
    pub fn new(m: usize, n: usize, pieces: Vec<PhPiece<T>>) -> Self {
        PhMap { m, n, pieces }
    }

    /// `u ↦ u` on `ℝⁿ`.
    pub fn identity(n: usize) -> Self {
        let eye = Mat::<T>::identity(n).row_vecs();
        PhMap::new(n, n, vec![PhPiece::new(PolyCone::whole(n), eye.clone(), eye)])
    }

    /// The single-valued linear map `u* ↦ L u*` (`L` by rows, `n × m`).
    pub fn linear(l: &[Vec<T>], m: usize) -> Self {
        PhMap::new(m, l.len(), vec![PhPiece::new(PolyCone::whole(m), Mat::<T>::identity(m).row_vecs(), l.to_vec())])
    }

    /// Graph as a union of cones in `(u*, x*)` coordinates.
    pub fn graph(&self) -> ConeUnion<T> {
        ConeUnion::new(self.m + self.n, self.pieces.iter().map(|p| p.graph_cone()).collect())
    }

    pub fn graph_contains(&self, u: &[T], x: &[T]) -> bool {
        let z: Vec<T> = u.iter().chain(x).copied().collect();
        self.pieces.iter().any(|p| p.graph_cone().contains(&z))
    }

    /// The inverse map `x* ↦ u*`.
    pub fn inverse(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| PhPiece { param: p.param.clone(), map_u: p.map_x.clone(), map_x: p.map_u.clone(), tags: p.tags.clone() })
            .collect();
        PhMap::new(self.n, self.m, pieces)
    }

    /// `H(u)` as the generator descriptions of its convex pieces.
    pub fn evaluate(&self, u: &[T]) -> Result<Vec<VRep<T>>> {
        if u.len() != self.m {
            return Err(Error::Schema(format!("input has length {}, expected {}", u.len(), self.m)));
        }
        let mut out = Vec::new();
        for piece in &self.pieces {
            let (a, c) = piece.param.h();
            let p = piece.param.dim();
            let mut eq = c.clone();
            let mut rhs = vec![T::zero(); c.len()];
            eq.extend(piece.map_u.iter().cloned());
            rhs.extend(u.iter().copied());
            let poly = HPolyhedron::new(p, a.clone(), vec![T::zero(); a.len()], eq, rhs)?;
            if let Some(v) = poly.vrep() {
                let img = |w: &Vec<T>| piece.output(w);
                out.push(VRep {
                    dim: self.n,
                    vertices: v.vertices.iter().map(img).collect(),
                    rays: v.rays.iter().map(img).collect(),
                    lineality: v.lineality.iter().map(img).collect(),
                });
            }
        }
        Ok(out)
    }

    /// Pieces carrying tag `t`.
    pub fn restricted_to(&self, t: usize) -> Self {
        PhMap::new(self.m, self.n, self.pieces.iter().filter(|p| p.tags.contains(&t)).cloned().collect())
    }
}

/// Coordinates of `y = (x*, w)` with `(x*, w)` in a normal cone of the graph: `x* = [I 0] y`,
/// `u* = -w = -[0 I] y`.
fn selectors<T: Scalar>(n: usize, m: usize) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let p = n + m;
    let sel_x = (0..n)
        .map(|i| {
            let mut r = vec![T::zero(); p];
            r[i] = T::one();
            r
        })
        .collect();
    let sel_u = (0..m)
        .map(|j| {
            let mut r = vec![T::zero(); p];
            r[n + j] = -T::one();
            r
        })
        .collect();
    (sel_u, sel_x)
}

/// The map whose graph is `{(-w, x*) : (x*, w) ∈ K}` for each cone `K` of a normal-cone union.
pub fn from_normal_cone<T: Scalar>(cone: &ConeUnion<T>, n: usize, m: usize) -> PhMap<T> {
    let (qu, px) = selectors::<T>(n, m);
    PhMap::new(m, n, cone.pieces.iter().map(|k| PhPiece::new(k.clone(), qu.clone(), px.clone())).collect())
}

/// Limiting coderivative `D*S(x̄|ū)`.
pub fn coderivative<T: Scalar>(s: &StratifiedMapping<T>, x: &[T], u: &[T]) -> Result<PhMap<T>> {
    let cone = s.limiting_normal_cone(x, u)?;
    Ok(from_normal_cone(&cone, s.n, s.m))
}

/// Linearity region of `v ↦ proj_T(v)` for a face `E` of a cone `T`: on
/// `{v : Π_E v ∈ E, (I - Π_E) v ∈ T°}` the projection is the orthogonal projector `Π_E`
/// onto `span E`.
#[derive(Clone, Debug)]
pub(crate) struct ProjRegion<T> {
    pub projector: Mat<T>,
    /// `r·v ≤ 0` for every row `r`.
    pub rows: Vec<Vec<T>>,
}

pub(crate) fn projection_regions<T: Scalar>(t: &PolyCone<T>) -> Result<Vec<ProjRegion<T>>> {
    let n = t.dim();
    let poly = t.as_polyhedron();
    let gens = t.generators();
    let mut out = Vec::new();
    for e in poly.faces(FACE_BUDGET)? {
        let basis = e.polyhedron().hull_directions();
        let pe = projector(&basis, n);
        let mut rows: Vec<Vec<T>> = poly.a().iter().map(|a| pe.mul_vec(a)).collect();
        let ie = Mat::identity(n).sub_mat(&pe);
        rows.extend(gens.rays.iter().map(|g| ie.mul_vec(g)));
        let rows = rows.into_iter().filter(|r| r.iter().any(|v| v.abs() > T::epsilon())).collect();
        out.push(ProjRegion { projector: pe, rows });
    }
    Ok(out)
}

/// Pieces of `{(u*, proj_T x*) : (x*, -u*) ∈ N}` for a polyhedral cone `N ⊂ ℝⁿ × ℝᵐ`.
pub(crate) fn projected_pieces<T: Scalar>(
    normal: &PolyCone<T>,
    regions: &[ProjRegion<T>],
    n: usize,
    m: usize,
    tags: &[usize],
) -> Vec<PhPiece<T>> {
    let zeros = vec![T::zero(); m];
    let (qu, _) = selectors::<T>(n, m);
    regions
        .iter()
        .map(|r| {
            let rows: Vec<Vec<T>> = r.rows.iter().map(|row| concat(row, &zeros)).collect();
            let px: Vec<Vec<T>> = r.projector.row_vecs().iter().map(|row| concat(row, &zeros)).collect();
            PhPiece { param: normal.with_rows(&rows, &[]), map_u: qu.clone(), map_x: px, tags: tags.to_vec() }
        })
        .collect()
}

/// Projectional coderivative `D*_X S(x̄|ū)`.
///
/// The outer limit in its definition is taken over the refined cells adjacent to `(x̄, ū)`:
/// for a cell `c` and every cell `c'` whose closure contains `c`, the regular normal cone of
/// the restricted graph on `c'` is projected onto `T_X` of `c`. The projection is split into
/// its linearity regions, each giving one linearly parametrised piece.
pub fn projectional_coderivative<T: Scalar>(
    s: &StratifiedMapping<T>,
    x_set: &HPolyhedron<T>,
    x: &[T],
    u: &[T],
) -> Result<PhMap<T>> {
    let refinement = s.refine(x_set)?;
    projectional_from_refinement(s, &refinement, x, u)
}

pub(crate) fn projectional_from_refinement<T: Scalar>(
    s: &StratifiedMapping<T>,
    r: &Refinement<T>,
    x: &[T],
    u: &[T],
) -> Result<PhMap<T>> {
    if !r.x_set.contains(x) {
        return Err(Error::Domain("x̄ is not in X".into()));
    }
    let z = s.checked_point(x, u)?;
    // (X-face of c, c') -> strata of the cells c using the pair
    let mut pairs: BTreeMap<(Vec<usize>, usize), Vec<usize>> = BTreeMap::new();
    for c in r.adjacent(&z) {
        for c2 in r.above(c) {
            let tags = pairs.entry((r.cells[c].x_active.clone(), c2)).or_default();
            if !tags.contains(&r.cells[c].stratum) {
                tags.push(r.cells[c].stratum);
            }
        }
    }
    let mut regions: BTreeMap<Vec<usize>, Vec<ProjRegion<T>>> = BTreeMap::new();
    let mut pieces = Vec::new();
    for ((face, c2), tags) in pairs {
        if !regions.contains_key(&face) {
            let cell = r.cells.iter().find(|c| c.x_active == face).expect("face comes from a cell");
            regions.insert(face.clone(), projection_regions(&cell.tangent)?);
        }
        pieces.extend(projected_pieces(&r.cells[c2].regular, &regions[&face], s.n, s.m, &tags));
    }
    Ok(PhMap::new(s.m, s.n, pieces))
}


#[cfg(test)]
mod tests;
