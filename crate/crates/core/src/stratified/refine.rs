//! Graph cells refined by the faces of a constraint set `X` on the input space.
//!
//! A cell is `ri(cl σ ∩ (G × ℝᵐ))` for a stratum `σ` and a face `G` of `X` with
//! `ri σ ∩ (ri G × ℝᵐ)` nonempty. On a cell the tangent cone `T_X(x)` and the regular normal
//! cone of the restricted graph `gph S ∩ (X × ℝᵐ)` are both constant.

use crate::error::{Error, Result};
use crate::geometry::dd::cone_generators;
use crate::geometry::{ConeUnion, HPolyhedron, PolyCone, FACE_BUDGET};
use crate::linalg::concat;
use crate::scalar::Scalar;

use super::StratifiedMapping;

/// Regular normal cone at `z` of `∪ pieces ∩ (X × ℝᵐ)`: the polar of the union of the
/// tangent cones of the pieces containing `z`, i.e. the cone with all their generators as
/// H-rows.
pub fn regular_normal<T: Scalar>(pieces: &[HPolyhedron<T>], x_set: Option<&HPolyhedron<T>>, z: &[T]) -> Result<PolyCone<T>> {
    let dim = z.len();
    let (xa, xc) = match x_set {
        Some(x) => {
            let n = x.dim();
            let m = dim - n;
            let zeros = vec![T::zero(); m];
            let act = x.active_set(&z[..n]);
            (
                act.iter().map(|&i| concat(&x.a()[i], &zeros)).collect::<Vec<_>>(),
                x.c().iter().map(|r| concat(r, &zeros)).collect::<Vec<_>>(),
            )
        }
        None => (Vec::new(), Vec::new()),
    };
    let mut rows = Vec::new();
    let mut eqs = Vec::new();
    let mut hit = false;
    for p in pieces.iter().filter(|p| p.contains(z)) {
        hit = true;
        let mut a: Vec<Vec<T>> = p.active_set(z).iter().map(|&i| p.a()[i].clone()).collect();
        a.extend(xa.iter().cloned());
        let mut c = p.c().to_vec();
        c.extend(xc.iter().cloned());
        let g = cone_generators(dim, &a, &c)?;
        rows.extend(g.rays);
        eqs.extend(g.lineality);
    }
    if !hit {
        return Err(Error::Domain("regular normal requested off the graph".into()));
    }
    Ok(PolyCone::from_h(dim, rows, eqs))
}

#[derive(Clone, Debug)]
pub struct Cell<T> {
    pub stratum: usize,
    /// Rows of `X` tight on the cell.
    pub x_active: Vec<usize>,
    pub closure: HPolyhedron<T>,
    pub point: Vec<T>,
    /// `T_X(x)` for `x` in the cell's input projection.
    pub tangent: PolyCone<T>,
    /// Regular normal cone of the restricted graph on the cell.
    pub regular: PolyCone<T>,
}

#[derive(Clone, Debug)]
pub struct Refinement<T> {
    pub n: usize,
    pub m: usize,
    pub x_set: HPolyhedron<T>,
    pub cells: Vec<Cell<T>>,
}

impl<T: Scalar> Refinement<T> {
    /// Cells whose closure contains `z`.
    pub fn adjacent(&self, z: &[T]) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].closure.contains(z)).collect()
    }

    /// Cells `c'` with `c ⊆ cl c'` (including `c` itself).
    pub fn above(&self, c: usize) -> Vec<usize> {
        self.adjacent(&self.cells[c].point)
    }

    /// Limiting normal cone of the restricted graph on cell `c`.
    pub fn limiting(&self, c: usize) -> ConeUnion<T> {
        let pieces = self.above(c).into_iter().map(|j| self.cells[j].regular.clone()).collect();
        ConeUnion::new(self.n + self.m, pieces).pruned()
    }
}

impl<T: Scalar> StratifiedMapping<T> {
    /// Refines the strata by the faces of `x_set` (a polyhedron in the input space).
    pub fn refine(&self, x_set: &HPolyhedron<T>) -> Result<Refinement<T>> {
        if x_set.dim() != self.n {
            return Err(Error::Schema(format!("X has dimension {}, expected {}", x_set.dim(), self.n)));
        }
        if x_set.is_empty() {
            return Err(Error::Domain("X is empty".into()));
        }
        let zeros = vec![T::zero(); self.m];
        let faces = x_set.faces(FACE_BUDGET)?;
        let lifted: Vec<HPolyhedron<T>> = faces
            .iter()
            .map(|g| {
                let f = g.polyhedron();
                HPolyhedron::new(
                    self.n + self.m,
                    f.a().iter().map(|r| concat(r, &zeros)).collect(),
                    f.b().to_vec(),
                    f.c().iter().map(|r| concat(r, &zeros)).collect(),
                    f.d().to_vec(),
                )
            })
            .collect::<Result<_>>()?;
        let mut cells = Vec::new();
        for (si, s) in self.strata.iter().enumerate() {
            for (g, lg) in faces.iter().zip(&lifted) {
                let closure = s.cell.intersect(lg)?;
                let Some(point) = closure.relint_point() else { continue };
                if !s.contains(&point) || !g.relint_contains(&point[..self.n]) {
                    continue;
                }
                let tangent = PolyCone::from_h(
                    self.n,
                    g.active.iter().map(|&i| x_set.a()[i].clone()).collect(),
                    x_set.c().to_vec(),
                );
                let regular = regular_normal(self.pieces(), Some(x_set), &point)?;
                cells.push(Cell { stratum: si, x_active: g.active.clone(), closure, point, tangent, regular });
            }
        }
        Ok(Refinement { n: self.n, m: self.m, x_set: x_set.clone(), cells })
    }
}
