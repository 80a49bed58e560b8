//! Piecewise-linear extended-real functions and their variational objects: subgradients,
//! projectional subgradients relative to a convex polyhedron, relative Lipschitz moduli,
//! support functions of polyhedra, level-set mappings and outer limiting subgradients.
//!
//! Everything is computed on the epigraph, read as the graph of the profile mapping
//! `x ↦ {α : α ≥ f(x)}` and stratified by the generic union builder.

mod level;
mod projectional;
mod sublinear;

pub use level::{level_set_analysis, level_set_mapping, outer_limiting_subdifferential, LevelSetReport};
pub use projectional::{projectional_subdifferentials, relative_lip_modulus, subdiff_report, RelativeLip, SubdiffReport};
pub use sublinear::{sublinear_analysis, FacePair, SublinearReport};

use crate::coderivative::ProjRegion;
use crate::error::{Error, Result};
use crate::geometry::{ConeUnion, HPolyhedron, PolyCone, VRep};
use crate::linalg::{concat, dot, sub};
use crate::scalar::Scalar;
use crate::stratified::{stratify_union, StratifiedMapping, UNION_BUDGET};
use crate::tolerance::Tol;

/// `f(x) = ⟨g, x⟩ + c` on a closed polyhedral cell.
#[derive(Clone, Debug)]
pub struct PlCell<T> {
    pub set: HPolyhedron<T>,
    pub g: Vec<T>,
    pub c: T,
}

/// A piecewise-linear function: affine on each cell, `+∞` off their union.
#[derive(Clone, Debug)]
pub struct PlFunction<T> {
    pub n: usize,
    pub cells: Vec<PlCell<T>>,
}

impl<T: Scalar> PlFunction<T> {
    /// Validates dimensions and that overlapping cells agree on their overlap.
    pub fn new(n: usize, cells: Vec<PlCell<T>>) -> Result<Self> {
        for (i, c) in cells.iter().enumerate() {
            if c.set.dim() != n || c.g.len() != n {
                return Err(Error::Schema(format!("cell {i} does not live in dimension {n}")));
            }
        }
        let cells: Vec<PlCell<T>> = cells.into_iter().filter(|c| !c.set.is_empty()).collect();
        if cells.is_empty() {
            return Err(Error::Domain("the function has empty domain".into()));
        }
        let tol = Tol::<T>::current();
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                let both = cells[i].set.intersect(&cells[j].set)?;
                if both.is_empty() {
                    continue;
                }
                let dg = sub(&cells[i].g, &cells[j].g);
                let dc = cells[i].c - cells[j].c;
                let scale = cells[i].c.abs().max(cells[j].c.abs());
                for s in [T::one(), -T::one()] {
                    let obj: Vec<T> = dg.iter().map(|v| s * *v).collect();
                    let gap = match both.lp_max(&obj) {
                        crate::lp::LpOutcome::Optimal { value, .. } => value + s * dc,
                        crate::lp::LpOutcome::Unbounded => T::infinity(),
                        crate::lp::LpOutcome::Infeasible => continue,
                    };
                    if gap > tol.rel(scale) {
                        return Err(Error::Schema(format!("cells {i} and {j} disagree on their overlap")));
                    }
                }
            }
        }
        Ok(PlFunction { n, cells })
    }

    /// `x ↦ ⟨g, x⟩ + c` on all of `ℝⁿ`.
    pub fn affine(g: Vec<T>, c: T) -> Self {
        let n = g.len();
        PlFunction { n, cells: vec![PlCell { set: HPolyhedron::full(n), g, c }] }
    }

    /// `x ↦ max_i ⟨g_i, x⟩ + c_i` on `ℝⁿ`, one cell per affine piece.
    pub fn max_affine(pieces: &[(Vec<T>, T)]) -> Result<Self> {
        let n = pieces.first().map(|p| p.0.len()).ok_or_else(|| Error::Schema("no affine pieces".into()))?;
        let mut cells = Vec::new();
        for (i, (g, c)) in pieces.iter().enumerate() {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for (j, (h, d)) in pieces.iter().enumerate() {
                if j != i {
                    // ⟨h, x⟩ + d ≤ ⟨g, x⟩ + c
                    a.push(sub(h, g));
                    b.push(*c - *d);
                }
            }
            cells.push(PlCell { set: HPolyhedron::inequalities(n, a, b)?, g: g.clone(), c: *c });
        }
        PlFunction::new(n, cells)
    }

    /// Support function `σ_D` of a nonempty polyhedron `D`.
    pub fn support_of(d: &HPolyhedron<T>) -> Result<Self> {
        let v = d.vrep().ok_or_else(|| Error::Domain("D is empty".into()))?;
        let n = d.dim();
        let mut cells = Vec::new();
        for (i, w) in v.vertices.iter().enumerate() {
            let mut a: Vec<Vec<T>> = v.vertices.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, u)| sub(u, w)).collect();
            let mut b = vec![T::zero(); a.len()];
            a.extend(v.rays.iter().cloned());
            b.extend(v.rays.iter().map(|_| T::zero()));
            let set = HPolyhedron::new(n, a, b, v.lineality.clone(), vec![T::zero(); v.lineality.len()])?;
            cells.push(PlCell { set, g: w.clone(), c: T::zero() });
        }
        PlFunction::new(n, cells)
    }

    /// `f(x)`, `+∞` outside the domain.
    pub fn value(&self, x: &[T]) -> T {
        self.cells.iter().filter(|c| c.set.contains(x)).map(|c| dot(&c.g, x) + c.c).fold(T::infinity(), T::min)
    }

    pub fn in_domain(&self, x: &[T]) -> bool {
        self.cells.iter().any(|c| c.set.contains(x))
    }

    /// Closed convex pieces of `epi f ⊂ ℝⁿ × ℝ`.
    pub fn epigraph_pieces(&self) -> Result<Vec<HPolyhedron<T>>> {
        self.cells
            .iter()
            .map(|c| {
                let z = [T::zero()];
                let mut a: Vec<Vec<T>> = c.set.a().iter().map(|r| concat(r, &z)).collect();
                let mut b = c.set.b().to_vec();
                a.push(concat(&c.g, &[-T::one()]));
                b.push(-c.c);
                HPolyhedron::new(self.n + 1, a, b, c.set.c().iter().map(|r| concat(r, &z)).collect(), c.set.d().to_vec())
            })
            .collect()
    }

    /// The profile mapping `x ↦ {α : α ≥ f(x)}`, whose graph is `epi f`.
    pub fn profile_mapping(&self) -> Result<StratifiedMapping<T>> {
        stratify_union(self.n, &self.epigraph_pieces()?, UNION_BUDGET)
    }

    pub(crate) fn checked_value(&self, x: &[T]) -> Result<T> {
        if x.len() != self.n {
            return Err(Error::Schema(format!("point has length {}, expected {}", x.len(), self.n)));
        }
        let v = self.value(x);
        if !v.is_finite() {
            return Err(Error::Domain("x̄ is not in dom f".into()));
        }
        Ok(v)
    }
}

/// `{v : (v, level) ∈ K}` for a cone `K ⊂ ℝⁿ × ℝ`.
pub(crate) fn slice_last<T: Scalar>(k: &PolyCone<T>, level: T) -> Result<HPolyhedron<T>> {
    let (a, c) = k.h();
    let n = k.dim() - 1;
    let split = |rows: &Vec<Vec<T>>| -> (Vec<Vec<T>>, Vec<T>) { rows.iter().map(|r| (r[..n].to_vec(), -r[n] * level)).unzip() };
    let (aa, bb) = split(a);
    let (cc, dd) = split(c);
    HPolyhedron::new(n, aa, bb, cc, dd)
}

/// `{(v, 0) ∈ K}` as a cone in `ℝⁿ`.
pub(crate) fn horizon_slice<T: Scalar>(k: &PolyCone<T>) -> PolyCone<T> {
    let n = k.dim() - 1;
    let mut last = vec![T::zero(); n + 1];
    last[n] = T::one();
    let g = k.with_rows(&[], &[last]).generators().clone();
    let cut = |v: &Vec<T>| v[..n].to_vec();
    PolyCone::from_g(n, g.rays.iter().map(cut).collect(), g.lineality.iter().map(cut).collect())
}

/// `∂f(x̄)` (as convex pieces) and `∂^∞f(x̄)`, read off the limiting normal cone of `epi f`.
pub fn subdifferentials<T: Scalar>(f: &PlFunction<T>, x: &[T]) -> Result<(Vec<HPolyhedron<T>>, ConeUnion<T>)> {
    let fx = f.checked_value(x)?;
    let e = f.profile_mapping()?;
    let normal = e.limiting_normal_cone(x, &[fx])?;
    split_normal(f.n, &normal)
}

pub(crate) fn split_normal<T: Scalar>(n: usize, normal: &ConeUnion<T>) -> Result<(Vec<HPolyhedron<T>>, ConeUnion<T>)> {
    let mut basic = Vec::new();
    for k in &normal.pieces {
        let s = slice_last(k, -T::one())?;
        if !s.is_empty() {
            basic.push(s);
        }
    }
    let horizon = ConeUnion::new(n, normal.pieces.iter().map(horizon_slice).collect()).pruned();
    Ok((dedup(basic), horizon))
}

/// Drops pieces contained in another piece.
pub(crate) fn dedup<T: Scalar>(pieces: Vec<HPolyhedron<T>>) -> Vec<HPolyhedron<T>> {
    let mut keep: Vec<HPolyhedron<T>> = Vec::new();
    for p in pieces {
        if keep.iter().any(|q| contains_poly(q, &p)) {
            continue;
        }
        keep.retain(|q| !contains_poly(&p, q));
        keep.push(p);
    }
    keep
}

/// `b ⊆ a` via the generators of `b`.
pub(crate) fn contains_poly<T: Scalar>(a: &HPolyhedron<T>, b: &HPolyhedron<T>) -> bool {
    let Some(v) = b.vrep() else { return true };
    let rec = a.recession_cone();
    let neg = |l: &Vec<T>| l.iter().map(|x| -*x).collect::<Vec<T>>();
    v.vertices.iter().all(|w| a.contains(w))
        && v.rays.iter().all(|r| rec.contains(r))
        && v.lineality.iter().all(|l| rec.contains(l) && rec.contains(&neg(l)))
}

/// Images of `p` under `v ↦ proj_T(v)`, one convex piece per linearity region of the
/// projection.
pub(crate) fn project_onto_regions<T: Scalar>(p: &HPolyhedron<T>, regions: &[ProjRegion<T>]) -> Result<Vec<HPolyhedron<T>>> {
    let n = p.dim();
    let mut out = Vec::new();
    for r in regions {
        let piece = p.intersect(&HPolyhedron::inequalities(n, r.rows.clone(), vec![T::zero(); r.rows.len()])?)?;
        let Some(v) = piece.vrep() else { continue };
        let img = |w: &Vec<T>| r.projector.mul_vec(w);
        let image = VRep {
            dim: n,
            vertices: v.vertices.iter().map(img).collect(),
            rays: v.rays.iter().map(img).filter(|w| w.iter().any(|x| x.abs() > T::epsilon())).collect(),
            lineality: v.lineality.iter().map(img).filter(|w| w.iter().any(|x| x.abs() > T::epsilon())).collect(),
        };
        out.push(HPolyhedron::from_vrep(&normalize_vrep(image))?);
    }
    Ok(out)
}

/// Makes lineality independent and vertices orthogonal to it, as `from_vrep` expects.
fn normalize_vrep<T: Scalar>(mut v: VRep<T>) -> VRep<T> {
    let eps = Tol::<T>::current().tau;
    v.lineality = crate::linalg::orthonormal_span(&v.lineality, eps);
    let strip = |w: &Vec<T>, basis: &[Vec<T>]| {
        let p = crate::linalg::project_onto_span(basis, w);
        sub(w, &p)
    };
    v.vertices = v.vertices.iter().map(|w| strip(w, &v.lineality)).collect();
    v.rays = v.rays.iter().map(|w| strip(w, &v.lineality)).filter(|w| crate::linalg::norm(w) > eps).collect();
    v
}

/// Maximum of `‖v‖` over a union of polyhedra (`+∞` if some piece is unbounded).
pub(crate) fn max_norm<T: Scalar>(pieces: &[HPolyhedron<T>]) -> (T, Option<Vec<T>>) {
    let mut best = T::zero();
    let mut arg = None;
    for p in pieces {
        let Some(v) = p.vrep() else { continue };
        if !v.is_bounded() {
            return (T::infinity(), v.rays.first().or(v.lineality.first()).cloned());
        }
        for w in &v.vertices {
            let nw = crate::linalg::norm(w);
            if arg.is_none() || nw > best {
                best = nw;
                arg = Some(w.clone());
            }
        }
    }
    (best, arg)
}

#[cfg(test)]
mod tests;
