//! Pointwise coderivative inequalities sampled at graph points near `(x̄, ū)`.
//!
//! The necessity form uses the regular normal cone of the restricted graph and `T_X(x)`;
//! the sufficiency form uses the limiting normal cone and the cone `cl pos(X - x)` generated
//! from the vertices and rays of `X`. Both cones are constant on a refined cell, so the worst
//! ratio `‖proj_K x*‖ / ‖u*‖` at a sampled point is computed exactly as an outer norm.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{HPolyhedron, PolyCone};
use crate::linalg::{norm, sub};
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::stratified::{Refinement, StratifiedMapping};
use crate::tolerance::Tol;

use super::{outer_norm, projected_pieces, projection_regions, OuterNorm, PhMap};

#[derive(Clone, Debug)]
pub struct Violation<T> {
    pub x: Vec<T>,
    pub u: Vec<T>,
    pub xstar: Vec<T>,
    pub ustar: Vec<T>,
    /// Unit direction of the cone attaining `max ⟨x*, w⟩`.
    pub w: Vec<T>,
    /// `‖proj_K x*‖ / ‖u*‖` (infinite when `u* = 0`).
    pub ratio: T,
}

#[derive(Clone, Debug)]
pub enum CheckOutcome<T> {
    Pass { samples: usize, worst: T },
    Witness(Violation<T>),
}

impl<T> CheckOutcome<T> {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass { .. })
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Necessity,
    Sufficiency,
}

/// Checks `max_{w ∈ T_X(x) ∩ 𝕊} ⟨x*, w⟩ ≤ κ‖u*‖` for regular coderivative pairs at sampled
/// graph points of `S|_X` within `radius` of `(x̄, ū)`.
#[allow(clippy::too_many_arguments)]
pub fn neighborhood_necessity_check<T: Scalar>(
    s: &StratifiedMapping<T>,
    x_set: &HPolyhedron<T>,
    x: &[T],
    u: &[T],
    kappa: T,
    radius: T,
    samples: usize,
    seed: u64,
) -> Result<CheckOutcome<T>> {
    run(Mode::Necessity, s, x_set, x, u, kappa, radius, samples, seed)
}

/// Checks `max_{w ∈ cl pos(X - x) ∩ 𝕊} ⟨x*, w⟩ ≤ κ‖u*‖` for limiting coderivative pairs at
/// sampled graph points of `S|_X` within `radius` of `(x̄, ū)`.
#[allow(clippy::too_many_arguments)]
pub fn neighborhood_sufficiency_check<T: Scalar>(
    s: &StratifiedMapping<T>,
    x_set: &HPolyhedron<T>,
    x: &[T],
    u: &[T],
    kappa: T,
    radius: T,
    samples: usize,
    seed: u64,
) -> Result<CheckOutcome<T>> {
    run(Mode::Sufficiency, s, x_set, x, u, kappa, radius, samples, seed)
}

/// `cl pos(X - x)` from the generator description of `X`.
pub(crate) fn generated_cone<T: Scalar>(x_set: &HPolyhedron<T>, x: &[T]) -> Result<PolyCone<T>> {
    let v = x_set.vrep().ok_or_else(|| Error::Domain("X is empty".into()))?;
    let mut rays: Vec<Vec<T>> = v.vertices.iter().map(|w| sub(w, x)).collect();
    rays.extend(v.rays.iter().cloned());
    Ok(PolyCone::from_g(x.len(), rays, v.lineality.clone()))
}

fn cell_ratio<T: Scalar>(mode: Mode, s: &StratifiedMapping<T>, r: &Refinement<T>, c: usize) -> Result<OuterNorm<T>> {
    let cell = &r.cells[c];
    let (cone, normals) = match mode {
        Mode::Necessity => (cell.tangent.clone(), vec![cell.regular.clone()]),
        Mode::Sufficiency => (generated_cone(&r.x_set, &cell.point[..s.n])?, r.limiting(c).pieces),
    };
    let regions = projection_regions(&cone)?;
    let pieces = normals.iter().flat_map(|k| projected_pieces(k, &regions, s.n, s.m, &[cell.stratum])).collect();
    outer_norm(&PhMap::new(s.m, s.n, pieces))
}

/// A random point of the cell within `radius` of `z̄` (on the segment from `z̄` to a random
/// relative-interior point).
fn sample_in_cell<T: Scalar, R: Rng>(r: &Refinement<T>, c: usize, zbar: &[T], radius: T, rng: &mut R) -> Vec<T> {
    let cell = &r.cells[c];
    let mut p = cell.point.clone();
    if let Some(v) = cell.closure.vrep() {
        let weights: Vec<f64> = v.vertices.iter().map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
        let total: f64 = weights.iter().sum();
        let mut q = vec![T::zero(); p.len()];
        for (w, vert) in weights.iter().zip(&v.vertices) {
            for (qi, vi) in q.iter_mut().zip(vert) {
                *qi += T::of(w / total) * *vi;
            }
        }
        for ray in &v.rays {
            let t = T::of(rng.gen::<f64>());
            for (qi, ri) in q.iter_mut().zip(ray) {
                *qi += t * *ri;
            }
        }
        for l in &v.lineality {
            let t = T::of(rng.gen_range(-1.0..1.0));
            for (qi, li) in q.iter_mut().zip(l) {
                *qi += t * *li;
            }
        }
        let half = T::of(0.5);
        p = p.iter().zip(&q).map(|(a, b)| half * *a + half * *b).collect();
    }
    let d = sub(&p, zbar);
    let nd = norm(&d);
    if nd <= T::epsilon() {
        return zbar.to_vec();
    }
    let s = radius * T::of(rng.gen_range(1e-3..1.0));
    let t = (s / nd).min(T::one());
    zbar.iter().zip(&d).map(|(z, di)| *z + t * *di).collect()
}

#[allow(clippy::too_many_arguments)]
fn run<T: Scalar>(
    mode: Mode,
    s: &StratifiedMapping<T>,
    x_set: &HPolyhedron<T>,
    x: &[T],
    u: &[T],
    kappa: T,
    radius: T,
    samples: usize,
    seed: u64,
) -> Result<CheckOutcome<T>> {
    if !x_set.contains(x) {
        return Err(Error::Domain("x̄ is not in X".into()));
    }
    let zbar = s.checked_point(x, u)?;
    let r = s.refine(x_set)?;
    let adjacent = r.adjacent(&zbar);
    let tol = Tol::<T>::current();
    let mut cache: HashMap<usize, OuterNorm<T>> = HashMap::new();
    let mut worst = T::zero();
    for i in 0..samples {
        let mut rng = stream(seed, mode as u64, i as u64);
        let c = adjacent[rng.gen_range(0..adjacent.len())];
        let z = sample_in_cell(&r, c, &zbar, radius, &mut rng);
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(c) {
            e.insert(cell_ratio(mode, s, &r, c)?);
        }
        let on = &cache[&c];
        worst = worst.max(on.value);
        if on.value > kappa * (T::one() + tol.tau) + tol.tau {
            let (ustar, proj) = on.witness.clone().expect("positive ratio has a witness");
            let y = on.param.clone().expect("witness parameter");
            let pn = norm(&proj);
            return Ok(CheckOutcome::Witness(Violation {
                x: z[..s.n].to_vec(),
                u: z[s.n..].to_vec(),
                xstar: y[..s.n].to_vec(),
                ustar,
                w: proj.iter().map(|v| *v / pn).collect(),
                ratio: on.value,
            }));
        }
    }
    Ok(CheckOutcome::Pass { samples, worst })
}
