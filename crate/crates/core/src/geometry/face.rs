use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::polyhedron::HPolyhedron;
use crate::scalar::Scalar;

/// A nonempty face of a polyhedron, identified by the inequality rows tight on all of it.
#[derive(Clone, Debug)]
pub struct Face<T> {
    pub parent: Arc<HPolyhedron<T>>,
    /// Sorted indices of the parent's inequality rows that are tight on the face.
    pub active: Vec<usize>,
    poly: HPolyhedron<T>,
    point: Vec<T>,
}

impl<T: Scalar> Face<T> {
    pub fn new(parent: Arc<HPolyhedron<T>>, mut active: Vec<usize>) -> Result<Self> {
        active.sort_unstable();
        active.dedup();
        let poly = parent.with_tight(&active)?;
        let point = poly.relint_point().ok_or_else(|| Error::Domain("empty face".into()))?;
        Ok(Face { parent, active, poly, point })
    }

    /// The face as a polyhedron (active rows promoted to equalities).
    pub fn polyhedron(&self) -> &HPolyhedron<T> {
        &self.poly
    }

    /// A point in the relative interior.
    pub fn relint_point(&self) -> &[T] {
        &self.point
    }

    /// Affine hull as `{x : M x = v}` (active rows plus the parent's equalities).
    pub fn affine_hull(&self) -> (Vec<Vec<T>>, Vec<T>) {
        let mut m: Vec<Vec<T>> = self.active.iter().map(|&i| self.parent.a()[i].clone()).collect();
        let mut v: Vec<T> = self.active.iter().map(|&i| self.parent.b()[i]).collect();
        m.extend(self.parent.c().iter().cloned());
        v.extend(self.parent.d().iter().cloned());
        (m, v)
    }

    pub fn dim(&self) -> usize {
        self.poly.hull_directions().len()
    }

    pub fn is_bounded(&self) -> bool {
        self.poly.vrep().is_none_or(|v| v.is_bounded())
    }

    /// `x` lies in the relative interior of this face.
    pub fn relint_contains(&self, x: &[T]) -> bool {
        self.parent.contains(x) && self.parent.active_set(x) == self.active
    }
}
