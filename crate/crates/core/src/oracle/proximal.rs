//! Proximal normals `v` at `x ∈ G`, detected by `x ∈ proj_G(x + t v)`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::HPolyhedron;
use crate::linalg::{dist, norm};
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::tolerance::Tol;

use super::SampleConfig;

/// The set `G`, either as a union of polyhedra (projected exactly) or as a membership test
/// (projected on a grid).
///
/// The grid test only rejects `v` when a member is certainly closer than `t`, so it accepts
/// every proximal normal plus directions whose angle to the proximal normal cone is up to about
/// `(2√dim / grid)^½`.
pub enum ProximalTarget<'a, T> {
    Pieces(&'a [HPolyhedron<T>]),
    Membership { dim: usize, member: &'a (dyn Fn(&[T]) -> bool + Sync) },
}

impl<T: Scalar> ProximalTarget<'_, T> {
    fn dim(&self) -> usize {
        match self {
            ProximalTarget::Pieces(p) => p.first().map_or(0, |q| q.dim()),
            ProximalTarget::Membership { dim, .. } => *dim,
        }
    }

    fn contains(&self, x: &[T]) -> bool {
        match self {
            ProximalTarget::Pieces(p) => p.iter().any(|q| q.contains(x)),
            ProximalTarget::Membership { member, .. } => member(x),
        }
    }

    /// Whether `d(y, G) ≥ t` for `y = x + t v`, i.e. `x` is a nearest point (up to the grid
    /// pitch).
    fn projects_back(&self, y: &[T], t: T, grid: usize) -> Result<bool> {
        match self {
            ProximalTarget::Pieces(p) => {
                let mut d = T::infinity();
                for q in p.iter().filter(|q| !q.is_empty()) {
                    d = d.min(q.distance(y)?);
                }
                Ok(d >= t - Tol::<T>::current().rel(t))
            }
            ProximalTarget::Membership { dim, member } => {
                let k = grid as i64;
                let pitch = t / T::of(grid as f64);
                let slack = pitch * T::of((*dim as f64).sqrt() * 0.5);
                let mut idx = vec![-k; *dim];
                let mut p = vec![T::zero(); *dim];
                loop {
                    for ((pi, yi), ii) in p.iter_mut().zip(y).zip(&idx) {
                        *pi = *yi + pitch * T::of(*ii as f64);
                    }
                    if dist(&p, y) < t - slack && member(&p) {
                        return Ok(false);
                    }
                    let mut j = 0;
                    loop {
                        if j == *dim {
                            return Ok(true);
                        }
                        idx[j] += 1;
                        if idx[j] <= k {
                            break;
                        }
                        idx[j] = -k;
                        j += 1;
                    }
                }
            }
        }
    }
}

/// Unit proximal normals to `G` at `x` found among random directions, for each radius `t` of
/// the configuration and `pairs_per_radius` directions per radius, in sample order.
pub fn sample_proximal_normals<T: Scalar>(g: &ProximalTarget<'_, T>, x: &[T], cfg: &SampleConfig) -> Result<Vec<Vec<T>>> {
    cfg.validate()?;
    if x.len() != g.dim() {
        return Err(Error::Schema(format!("point has length {}, expected {}", x.len(), g.dim())));
    }
    if !g.contains(x) {
        return Err(Error::Domain("x is not in G".into()));
    }
    let mut out = Vec::new();
    for (ri, &rf) in cfg.radii.iter().enumerate() {
        let t = T::of(rf);
        let found: Vec<Result<Option<Vec<T>>>> = (0..cfg.pairs_per_radius)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(cfg.seed, ri as u64, i as u64);
                let v: Vec<T> = (0..x.len()).map(|_| T::of(rng.sample::<f64, _>(StandardNormal))).collect();
                let nv = norm(&v);
                if nv <= T::epsilon() {
                    return Ok(None);
                }
                let v: Vec<T> = v.iter().map(|c| *c / nv).collect();
                let y: Vec<T> = x.iter().zip(&v).map(|(a, b)| *a + t * *b).collect();
                Ok(g.projects_back(&y, t, cfg.set_discretization)?.then_some(v))
            })
            .collect();
        for f in found {
            if let Some(v) = f? {
                out.push(v);
            }
        }
    }
    Ok(out)
}
