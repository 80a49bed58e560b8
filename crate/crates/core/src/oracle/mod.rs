//! Sampling estimates taken straight from the definitions: difference quotients of excesses
//! for set-valued mappings, of values for functions, and proximal normals from projections.
//!
//! Every sample is drawn from its own counter-keyed stream `(seed, radius index, sample index)`,
//! so a report depends only on the seed and the configuration, never on thread scheduling.
//! Reductions take the maximum over a fixed index order with ties going to the lower index.

mod function;
mod mapping;
mod proximal;

pub use function::{disk_example, estimate_function_modulus, hyperbola_example, ratio_along_pairs, FunctionWitness, FnBox};

pub use mapping::{estimate_modulus, replay_witness, FnMap, Replay, SetValue, SetValuedMap, Witness};
pub use proximal::{sample_proximal_normals, ProximalTarget};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HPolyhedron;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub seed: u64,
    /// Neighbourhood half-widths, strictly decreasing.
    pub radii: Vec<f64>,
    pub pairs_per_radius: usize,
    /// Extra points per polyhedral value when maximising distances, and grid resolution for
    /// membership-oracle projections.
    pub set_discretization: usize,
    /// Local improvement steps applied to the best pair at each radius.
    pub refine_steps: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { seed: 0, radii: vec![1e-1, 1e-2, 1e-3], pairs_per_radius: 10_000, set_discretization: 16, refine_steps: 400 }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::Schema("sampling.radii must not be empty".into()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Schema("sampling.radii must be positive".into()));
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Schema("sampling.radii must be strictly decreasing".into()));
        }
        if self.pairs_per_radius == 0 {
            return Err(Error::Schema("sampling.pairs_per_radius must be at least 1".into()));
        }
        if self.set_discretization == 0 {
            return Err(Error::Schema("sampling.set_discretization must be at least 1".into()));
        }
        Ok(())
    }
}

/// Best ratio seen at one radius.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusBound<T> {
    pub radius: T,
    pub ratio: T,
}

/// How the per-radius lower bounds move as the radius shrinks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Stable,
    Increasing,
    Decreasing,
    /// Grows without levelling off: doubling at every radius, or a witness sequence still
    /// climbing at its end.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<T> {
    /// The finest-radius bound does not exceed `κ`.
    ConsistentWith(T),
    /// A sampled pair at the finest radius violates the inclusion for `κ`.
    Falsifies(T),
}

#[derive(Clone, Debug)]
pub struct EstimateReport<T, W> {
    pub lower_bounds: Vec<RadiusBound<T>>,
    pub trend: Trend,
    /// Best pair at the finest radius.
    pub witness: Option<W>,
    pub verdict: Option<Verdict<T>>,
}

impl<T: Scalar, W> EstimateReport<T, W> {
    /// The bound at the finest radius.
    pub fn estimate(&self) -> T {
        self.lower_bounds.last().map_or(T::zero(), |b| b.ratio)
    }
}

pub(crate) fn trend_of<T: Scalar>(bounds: &[RadiusBound<T>]) -> Trend {
    let r: Vec<f64> = bounds.iter().map(|b| b.ratio.as_f64()).collect();
    if r.len() < 2 {
        return Trend::Stable;
    }
    if r.iter().any(|v| v.is_infinite()) || r.windows(2).all(|w| w[1] >= 2.0 * w[0] && w[1] > 0.0) {
        return Trend::Unbounded;
    }
    let (first, last) = (r[0], r[r.len() - 1]);
    let scale = first.abs().max(last.abs()).max(1e-300);
    if (last - first).abs() <= 0.02 * scale {
        Trend::Stable
    } else if last > first {
        Trend::Increasing
    } else {
        Trend::Decreasing
    }
}

/// Trend of difference quotients along a witness sequence ordered towards the base point.
///
/// A nondecreasing sequence whose last value is at least 1.2 times its midpoint value has not
/// levelled off (√k growth gives √2) and is flagged [`Trend::Unbounded`].
pub fn trend_along<T: Scalar>(ratios: &[T]) -> Trend {
    let r: Vec<f64> = ratios.iter().map(|v| v.as_f64()).collect();
    if r.len() < 2 {
        return Trend::Stable;
    }
    if r.iter().any(|v| v.is_infinite()) {
        return Trend::Unbounded;
    }
    let nondecreasing = r.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    let (mid, last) = (r[(r.len() - 1) / 2], r[r.len() - 1]);
    if nondecreasing && mid > 0.0 && last >= 1.2 * mid {
        return Trend::Unbounded;
    }
    let bounds: Vec<RadiusBound<f64>> = r.iter().map(|&ratio| RadiusBound { radius: 0.0, ratio }).collect();
    trend_of(&bounds)
}

pub(crate) fn verdict_of<T: Scalar>(estimate: T, kappa: Option<T>) -> Option<Verdict<T>> {
    kappa.map(|k| if estimate > k { Verdict::Falsifies(k) } else { Verdict::ConsistentWith(k) })
}

/// `X ∩ (x̄ + r[-1, 1]ⁿ)`.
pub(crate) fn local_set<T: Scalar>(x_set: &HPolyhedron<T>, x: &[T], r: T) -> Result<HPolyhedron<T>> {
    let lo: Vec<T> = x.iter().map(|c| *c - r).collect();
    let hi: Vec<T> = x.iter().map(|c| *c + r).collect();
    x_set.intersect(&HPolyhedron::boxed(&lo, &hi)?)
}

/// Random point of a nonempty polytope: a Dirichlet-weighted combination of a random subset
/// of its vertices, so faces of every dimension get hit.
pub(crate) fn point_in<T: Scalar, R: rand::Rng>(p: &HPolyhedron<T>, rng: &mut R) -> Vec<T> {
    let v = p.vrep().expect("nonempty polytope");
    let k = v.vertices.len();
    let take = if rng.gen_bool(0.5) { k } else { rng.gen_range(1..=k.min(p.dim() + 1)) };
    let mut idx: Vec<usize> = (0..k).collect();
    for i in 0..take {
        let j = rng.gen_range(i..k);
        idx.swap(i, j);
    }
    let w: Vec<f64> = (0..take).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let total: f64 = w.iter().sum();
    let mut out = vec![T::zero(); p.dim()];
    for (wi, &i) in w.iter().zip(&idx[..take]) {
        for (o, c) in out.iter_mut().zip(&v.vertices[i]) {
            *o += T::of(wi / total) * *c;
        }
    }
    for l in &v.lineality {
        let t = T::of(rng.gen_range(-1.0..1.0));
        for (o, c) in out.iter_mut().zip(l) {
            *o += t * *c;
        }
    }
    out
}

/// `argmax` over an indexed family with ties going to the lower index.
pub(crate) fn best_by<T: Scalar, W>(items: Vec<(T, W)>) -> Option<(T, W)> {
    let mut best: Option<(T, W)> = None;
    for (v, w) in items {
        let better = match &best {
            None => true,
            Some((b, _)) => v > *b || (!v.is_nan() && b.is_nan()),
        };
        if better {
            best = Some((v, w));
        }
    }
    best
}

#[cfg(test)]
mod tests;
