use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::dd::{cone_generators, cone_hrep, ConeGenerators};
use crate::geometry::polyhedron::HPolyhedron;
use crate::linalg::{dot, norm, normalized, orthonormal_span, sub};
use crate::qp;
use crate::scalar::Scalar;
use crate::tolerance::Tol;

/// Polyhedral convex cone, held in whichever of the two forms it was built from; the other
/// form is derived on demand by double description.
///
/// H-form: `{x : a_i·x ≤ 0, c_j·x = 0}`. G-form: `cone(rays) + span(lineality)`.
#[derive(Clone, Debug)]
pub struct PolyCone<T> {
    dim: usize,
    h: OnceLock<(Vec<Vec<T>>, Vec<Vec<T>>)>,
    g: OnceLock<ConeGenerators<T>>,
    poly: OnceLock<HPolyhedron<T>>,
}

impl<T: Scalar> PolyCone<T> {
    pub fn from_h(dim: usize, a: Vec<Vec<T>>, c: Vec<Vec<T>>) -> Self {
        let h = OnceLock::new();
        let _ = h.set((a, c));
        PolyCone { dim, h, g: OnceLock::new(), poly: OnceLock::new() }
    }

    /// Rays are rescaled to unit length (zero rays dropped) and the lineality vectors
    /// replaced by an orthonormal basis of their span.
    pub fn from_g(dim: usize, rays: Vec<Vec<T>>, lineality: Vec<Vec<T>>) -> Self {
        let eps = Tol::<T>::current().tau;
        let rays = rays.iter().filter_map(|r| normalized(r, eps)).collect();
        let lineality = orthonormal_span(&lineality, eps);
        let g = OnceLock::new();
        let _ = g.set(ConeGenerators { rays, lineality });
        PolyCone { dim, h: OnceLock::new(), g, poly: OnceLock::new() }
    }

    pub fn whole(dim: usize) -> Self {
        Self::from_h(dim, Vec::new(), Vec::new())
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_g(dim, Vec::new(), Vec::new())
    }

    /// Nonnegative orthant.
    pub fn orthant(dim: usize) -> Self {
        let a = (0..dim)
            .map(|i| {
                let mut r = vec![T::zero(); dim];
                r[i] = -T::one();
                r
            })
            .collect();
        Self::from_h(dim, a, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(inequality rows, equality rows)`.
    pub fn h(&self) -> &(Vec<Vec<T>>, Vec<Vec<T>>) {
        self.h.get_or_init(|| {
            let g = self.g.get().expect("cone has one representation");
            cone_hrep(self.dim, &g.rays, &g.lineality).expect("double description of a cone")
        })
    }

    pub fn generators(&self) -> &ConeGenerators<T> {
        self.g.get_or_init(|| {
            let (a, c) = self.h.get().expect("cone has one representation");
            cone_generators(self.dim, a, c).expect("double description of a cone")
        })
    }

    /// The cone as a polyhedron (zero right-hand sides).
    pub fn as_polyhedron(&self) -> &HPolyhedron<T> {
        self.poly.get_or_init(|| {
            let (a, c) = self.h();
            HPolyhedron::new(self.dim, a.clone(), vec![T::zero(); a.len()], c.clone(), vec![T::zero(); c.len()])
                .expect("cone rows are well formed")
        })
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let tol = Tol::<T>::current();
        let s = norm(v).max(T::one()) * tol.tau;
        let (a, c) = self.h();
        a.iter().all(|r| dot(r, v) <= s) && c.iter().all(|r| dot(r, v).abs() <= s)
    }

    /// Polar cone `{y : ⟨y, x⟩ ≤ 0 ∀x}`. Swaps the roles of rows and generators, no solve.
    pub fn polar(&self) -> PolyCone<T> {
        if let Some(g) = self.g.get() {
            return PolyCone::from_h(self.dim, g.rays.clone(), g.lineality.clone());
        }
        let (a, c) = self.h.get().expect("cone has one representation");
        PolyCone::from_g(self.dim, a.clone(), c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.generators().is_zero()
    }

    pub fn is_subset_of(&self, other: &PolyCone<T>) -> bool {
        let g = self.generators();
        g.rays.iter().all(|r| other.contains(r))
            && g.lineality.iter().all(|l| other.contains(l) && other.contains(&l.iter().map(|x| -*x).collect::<Vec<T>>()))
    }

    pub fn same_as(&self, other: &PolyCone<T>) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    pub fn intersect(&self, other: &PolyCone<T>) -> PolyCone<T> {
        let (a1, c1) = self.h();
        let (a2, c2) = other.h();
        PolyCone::from_h(self.dim, a1.iter().chain(a2).cloned().collect(), c1.iter().chain(c2).cloned().collect())
    }

    /// Adds extra H-rows.
    pub fn with_rows(&self, a: &[Vec<T>], c: &[Vec<T>]) -> PolyCone<T> {
        let (a1, c1) = self.h();
        PolyCone::from_h(self.dim, a1.iter().chain(a).cloned().collect(), c1.iter().chain(c).cloned().collect())
    }

    /// Minkowski sum, from generators.
    pub fn sum(&self, other: &PolyCone<T>) -> PolyCone<T> {
        let g1 = self.generators();
        let g2 = other.generators();
        PolyCone::from_g(
            self.dim,
            g1.rays.iter().chain(&g2.rays).cloned().collect(),
            g1.lineality.iter().chain(&g2.lineality).cloned().collect(),
        )
    }

    /// Image under the linear map `x ↦ M x` (`M` given by rows, output dimension `rows.len()`).
    pub fn image(&self, rows: &[Vec<T>]) -> PolyCone<T> {
        let g = self.generators();
        let apply = |v: &Vec<T>| rows.iter().map(|r| dot(r, v)).collect::<Vec<T>>();
        PolyCone::from_g(rows.len(), g.rays.iter().map(apply).collect(), g.lineality.iter().map(apply).collect())
    }

    /// Euclidean projection with its Moreau certificate.
    pub fn project(&self, v: &[T]) -> Result<ConeProjection<T>> {
        let (a, c) = self.h();
        let zb = vec![T::zero(); a.len()];
        let zd = vec![T::zero(); c.len()];
        let sol = qp::project(v, a, &zb, c, &zd)?;
        let dual = sub(v, &sol.point);
        let tol = Tol::<T>::current();
        let s = norm(v).max(T::one()) * tol.tau;
        let active: Vec<usize> = (0..a.len()).filter(|&i| dot(&a[i], &sol.point).abs() <= s).collect();
        let residual = qp::certificate_residual(v, &sol, a, c);
        let out = ConeProjection { point: sol.point, dual, active, lambda: sol.lambda, residual };
        if out.residual > T::of(1e3) * s || out.lambda.iter().any(|l| *l < -s) {
            return Err(Error::Numerical("cone projection certificate failed".into()));
        }
        Ok(out)
    }
}

/// Result of projecting onto a cone: `v = point + dual`, `point ∈ K`, `dual ∈ K°`,
/// `⟨point, dual⟩ = 0`. `lambda` expresses `dual` over the active rows.
#[derive(Clone, Debug)]
pub struct ConeProjection<T> {
    pub point: Vec<T>,
    pub dual: Vec<T>,
    pub active: Vec<usize>,
    pub lambda: Vec<T>,
    pub residual: T,
}

/// Finite union of polyhedral cones.
#[derive(Clone, Debug)]
pub struct ConeUnion<T> {
    pub dim: usize,
    pub pieces: Vec<PolyCone<T>>,
}

impl<T: Scalar> ConeUnion<T> {
    pub fn new(dim: usize, pieces: Vec<PolyCone<T>>) -> Self {
        ConeUnion { dim, pieces }
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.pieces.iter().any(|p| p.contains(v))
    }

    /// Drops pieces contained in another piece (the first of equal pieces is kept).
    pub fn pruned(mut self) -> Self {
        let mut keep = vec![true; self.pieces.len()];
        for i in 0..self.pieces.len() {
            for j in 0..self.pieces.len() {
                if i == j || !keep[j] || !keep[i] {
                    continue;
                }
                if self.pieces[i].is_subset_of(&self.pieces[j]) {
                    let equal = self.pieces[j].is_subset_of(&self.pieces[i]);
                    if !equal || j < i {
                        keep[i] = false;
                    }
                }
            }
        }
        let mut k = keep.into_iter();
        self.pieces.retain(|_| k.next().unwrap());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_zero())
    }
}
