//! Set-valued mappings whose graphs are finite unions of convex polyhedra.
//!
//! The graph lives in `ℝⁿ × ℝᵐ` with the input coordinates first. It is stored twice: as the
//! closed convex pieces whose union is the graph (used for evaluation and for regular normal
//! cones), and as a partition into relatively open strata carrying their limiting normal cones.

mod lcp;
mod linsys;
mod refine;
mod union;

pub use lcp::build_lcp;
pub use linsys::build_linear_system;
pub use refine::{regular_normal, Cell, Refinement};
pub use union::{stratify_union, UNION_BUDGET};

use crate::error::{Error, Result};
use crate::geometry::{ConeUnion, HPolyhedron};
use crate::scalar::Scalar;

/// Relative interior of a closed convex polyhedral cell, with the limiting normal cone of the
/// graph shared by all of its points.
#[derive(Clone, Debug)]
pub struct Stratum<T> {
    /// Closure of the stratum; the stratum itself is its relative interior.
    pub cell: HPolyhedron<T>,
    pub normals: ConeUnion<T>,
    pub label: String,
    point: Vec<T>,
}

impl<T: Scalar> Stratum<T> {
    pub fn new(cell: HPolyhedron<T>, normals: ConeUnion<T>, label: String) -> Result<Self> {
        let point = cell.relint_point().ok_or_else(|| Error::Domain(format!("stratum {label} is empty")))?;
        Ok(Stratum { cell, normals, label, point })
    }

    /// A point of the stratum.
    pub fn point(&self) -> &[T] {
        &self.point
    }

    pub fn contains(&self, z: &[T]) -> bool {
        self.cell.relint_contains(z)
    }

    pub fn closure_contains(&self, z: &[T]) -> bool {
        self.cell.contains(z)
    }
}

#[derive(Clone, Debug)]
pub struct StratifiedMapping<T> {
    pub n: usize,
    pub m: usize,
    pub strata: Vec<Stratum<T>>,
    /// The union of the stratum closures is the (closed) graph.
    pub closed: bool,
    pieces: Vec<HPolyhedron<T>>,
    dom: Option<HPolyhedron<T>>,
}

impl<T: Scalar> StratifiedMapping<T> {
    pub(crate) fn assemble(
        n: usize,
        m: usize,
        strata: Vec<Stratum<T>>,
        pieces: Vec<HPolyhedron<T>>,
        dom: Option<HPolyhedron<T>>,
    ) -> Self {
        StratifiedMapping { n, m, strata, closed: true, pieces, dom }
    }

    /// Closed convex pieces covering the graph.
    pub fn pieces(&self) -> &[HPolyhedron<T>] {
        &self.pieces
    }

    /// Domain as a polyhedron when the builder knows it in closed form.
    pub fn domain(&self) -> Option<&HPolyhedron<T>> {
        self.dom.as_ref()
    }

    /// `S(x)` as the nonempty slices of the graph pieces.
    pub fn evaluate(&self, x: &[T]) -> Result<Vec<HPolyhedron<T>>> {
        if x.len() != self.n {
            return Err(Error::Schema(format!("evaluation point has length {}, expected {}", x.len(), self.n)));
        }
        let mut out = Vec::new();
        for p in &self.pieces {
            let s = p.slice(x)?;
            if !s.is_empty() && !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }

    pub fn graph_contains(&self, z: &[T]) -> bool {
        self.pieces.iter().any(|p| p.contains(z))
    }

    /// Index of the stratum containing `z`.
    pub fn stratum_of(&self, z: &[T]) -> Option<usize> {
        self.strata.iter().position(|s| s.contains(z))
    }

    /// Strata whose closure contains `z`.
    pub fn adjacent_strata(&self, z: &[T]) -> Vec<usize> {
        (0..self.strata.len()).filter(|&i| self.strata[i].closure_contains(z)).collect()
    }

    fn point(&self, x: &[T], u: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n || u.len() != self.m {
            return Err(Error::Schema("point dimensions do not match the mapping".into()));
        }
        let z: Vec<T> = x.iter().chain(u).copied().collect();
        if !self.graph_contains(&z) {
            return Err(Error::Domain("point is not on the graph".into()));
        }
        Ok(z)
    }

    /// Limiting normal cone of the graph at `(x, u)`.
    pub fn limiting_normal_cone(&self, x: &[T], u: &[T]) -> Result<ConeUnion<T>> {
        let z = self.point(x, u)?;
        Ok(self.limiting_normal_at(&z))
    }

    pub(crate) fn limiting_normal_at(&self, z: &[T]) -> ConeUnion<T> {
        let mut pieces = Vec::new();
        for i in self.adjacent_strata(z) {
            pieces.extend(self.strata[i].normals.pieces.iter().cloned());
        }
        ConeUnion::new(self.n + self.m, pieces).pruned()
    }

    pub(crate) fn checked_point(&self, x: &[T], u: &[T]) -> Result<Vec<T>> {
        self.point(x, u)
    }
}

/// Free function form of [`StratifiedMapping::limiting_normal_cone`].
pub fn limiting_normal_cone<T: Scalar>(s: &StratifiedMapping<T>, x: &[T], u: &[T]) -> Result<ConeUnion<T>> {
    s.limiting_normal_cone(x, u)
}

/// `({1,2},∅,{3})`-style label for an index partition (1-based).
pub(crate) fn triple_label(parts: [&[usize]; 3]) -> String {
    let set = |s: &[usize]| {
        if s.is_empty() {
            "∅".to_string()
        } else {
            format!("{{{}}}", s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","))
        }
    };
    format!("({},{},{})", set(parts[0]), set(parts[1]), set(parts[2]))
}

#[cfg(test)]
mod tests;
