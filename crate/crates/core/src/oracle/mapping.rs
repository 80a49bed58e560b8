//! Lower bounds on the graphical modulus of `S` relative to `X` from the inclusion
//! `S(x') ∩ W ⊂ S(x) + κ‖x' - x‖𝔹` at sampled pairs `x, x' ∈ X ∩ V`.
//!
//! Neighbourhoods are boxes: `V = x̄ + r[-1,1]ⁿ` and `W = ū + r[-1,1]ᵐ`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::HPolyhedron;
use crate::linalg::{dist, norm_inf};
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::stratified::StratifiedMapping;
use crate::tolerance::Tol;

use super::{best_by, local_set, point_in, trend_of, verdict_of, EstimateReport, RadiusBound, SampleConfig};

/// A value `S(x)`: a union of polyhedra or a finite point cloud.
#[derive(Clone, Debug)]
pub enum SetValue<T> {
    Polyhedra(Vec<HPolyhedron<T>>),
    Cloud(Vec<Vec<T>>),
}

impl<T: Scalar> SetValue<T> {
    fn is_empty(&self) -> bool {
        match self {
            SetValue::Polyhedra(p) => p.iter().all(|q| q.is_empty()),
            SetValue::Cloud(c) => c.is_empty(),
        }
    }

    fn distance(&self, u: &[T]) -> Result<T> {
        let mut best = T::infinity();
        match self {
            SetValue::Polyhedra(ps) => {
                for p in ps.iter().filter(|p| !p.is_empty()) {
                    best = best.min(p.distance(u)?);
                }
            }
            SetValue::Cloud(c) => {
                for v in c {
                    best = best.min(dist(u, v));
                }
            }
        }
        Ok(best)
    }

    fn contains(&self, u: &[T]) -> bool {
        match self {
            SetValue::Polyhedra(ps) => ps.iter().any(|p| p.contains(u)),
            SetValue::Cloud(c) => c.iter().any(|v| norm_inf(&crate::linalg::sub(u, v)) <= Tol::<T>::current().tau),
        }
    }

    /// Candidate maximisers of `d(·, S(x))` over `self ∩ w`: vertices plus random points.
    fn candidates<R: Rng>(&self, w: &HPolyhedron<T>, extra: usize, rng: &mut R) -> Result<Vec<Vec<T>>> {
        match self {
            SetValue::Polyhedra(ps) => {
                let mut out = Vec::new();
                for p in ps {
                    let q = p.intersect(w)?;
                    let Some(v) = q.vrep() else { continue };
                    out.extend(v.vertices.iter().cloned());
                    for _ in 0..extra {
                        out.push(point_in(&q, rng));
                    }
                }
                Ok(out)
            }
            SetValue::Cloud(c) => Ok(c.iter().filter(|u| w.contains(u)).cloned().collect()),
        }
    }
}

/// A set-valued mapping that can be evaluated pointwise.
pub trait SetValuedMap<T: Scalar>: Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn value(&self, x: &[T]) -> Result<SetValue<T>>;
}

impl<T: Scalar> SetValuedMap<T> for StratifiedMapping<T> {
    fn input_dim(&self) -> usize {
        self.n
    }

    fn output_dim(&self) -> usize {
        self.m
    }

    fn value(&self, x: &[T]) -> Result<SetValue<T>> {
        Ok(SetValue::Polyhedra(self.evaluate(x)?))
    }
}

/// A mapping given by a closure.
pub struct FnMap<F> {
    pub n: usize,
    pub m: usize,
    pub f: F,
}

impl<T: Scalar, F: Fn(&[T]) -> Result<SetValue<T>> + Sync> SetValuedMap<T> for FnMap<F> {
    fn input_dim(&self) -> usize {
        self.n
    }

    fn output_dim(&self) -> usize {
        self.m
    }

    fn value(&self, x: &[T]) -> Result<SetValue<T>> {
        (self.f)(x)
    }
}

/// A pair `x, x'` and a point `u' ∈ S(x') ∩ W` with `d(u', S(x)) = ratio · ‖x' - x‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<T> {
    pub x: Vec<T>,
    pub xp: Vec<T>,
    pub up: Vec<T>,
    pub radius: T,
    pub kappa: Option<T>,
    pub ratio: T,
}

fn box_around<T: Scalar>(c: &[T], r: T) -> Result<HPolyhedron<T>> {
    let lo: Vec<T> = c.iter().map(|v| *v - r).collect();
    let hi: Vec<T> = c.iter().map(|v| *v + r).collect();
    HPolyhedron::boxed(&lo, &hi)
}

/// `e(S(x') ∩ W, S(x)) / ‖x' - x‖` maximised over the candidate points, with the maximiser.
fn pair_ratio<T: Scalar, S: SetValuedMap<T> + ?Sized, R: Rng>(
    s: &S,
    x: &[T],
    xp: &[T],
    w: &HPolyhedron<T>,
    extra: usize,
    rng: &mut R,
) -> Result<(T, Option<Vec<T>>)> {
    let d = dist(x, xp);
    if d <= T::epsilon() {
        return Ok((T::zero(), None));
    }
    let ctx = |e: Error| e.context(&format!("evaluating S at {x:?} / {xp:?}"));
    let sx = s.value(x).map_err(ctx)?;
    let sxp = s.value(xp).map_err(ctx)?;
    let cands = sxp.candidates(w, extra, rng)?;
    if cands.is_empty() {
        return Ok((T::zero(), None));
    }
    if sx.is_empty() {
        return Ok((T::infinity(), Some(cands[0].clone())));
    }
    let mut best = T::zero();
    let mut arg = None;
    for u in cands {
        let e = sx.distance(&u)?;
        if arg.is_none() || e > best {
            best = e;
            arg = Some(u);
        }
    }
    Ok((best / d, arg))
}

/// Moves one endpoint of the pair at a time by a random step projected back onto `v`, keeping
/// improvements and halving the step after repeated failures.
#[allow(clippy::too_many_arguments)]
fn hill_climb<T: Scalar, S: SetValuedMap<T> + ?Sized>(
    s: &S,
    v: &HPolyhedron<T>,
    w: &HPolyhedron<T>,
    start: (T, Vec<T>, Vec<T>, Vec<T>),
    r: T,
    cfg: &SampleConfig,
    ri: u64,
) -> Result<(T, Vec<T>, Vec<T>, Vec<T>)> {
    let (mut best, mut x, mut xp, mut up) = start;
    if !best.is_finite() {
        return Ok((best, x, xp, up));
    }
    let mut step = r * T::of(0.25);
    let mut fails = 0;
    for k in 0..cfg.refine_steps {
        let mut rng = stream(cfg.seed, ri, (cfg.pairs_per_radius + k) as u64);
        let which = rng.gen_range(0..3);
        let mut cand = [x.clone(), xp.clone()];
        for (j, p) in cand.iter_mut().enumerate() {
            if which == 2 || which == j {
                let moved: Vec<T> = p.iter().map(|c| *c + step * T::of(rng.gen_range(-1.0..1.0))).collect();
                *p = v.project(&moved)?.point;
            }
        }
        let (ratio, arg) = pair_ratio(s, &cand[0], &cand[1], w, cfg.set_discretization, &mut rng)?;
        if ratio > best {
            if let Some(u) = arg {
                best = ratio;
                [x, xp] = cand;
                up = u;
                fails = 0;
                continue;
            }
        }
        fails += 1;
        if fails >= 8 {
            step *= T::of(0.5);
            fails = 0;
        }
    }
    Ok((best, x, xp, up))
}

/// Per-radius lower bounds on `lip_X S(x̄|ū)`.
pub fn estimate_modulus<T: Scalar, S: SetValuedMap<T> + ?Sized>(
    s: &S,
    x_set: &HPolyhedron<T>,
    x: &[T],
    u: &[T],
    cfg: &SampleConfig,
    kappa: Option<T>,
) -> Result<EstimateReport<T, Witness<T>>> {
    cfg.validate()?;
    if x.len() != s.input_dim() || u.len() != s.output_dim() || x_set.dim() != x.len() {
        return Err(Error::Schema("point, set and mapping dimensions disagree".into()));
    }
    if !x_set.contains(x) {
        return Err(Error::Domain("x̄ is not in X".into()));
    }
    let mut lower_bounds = Vec::new();
    let mut witness = None;
    for (ri, &rf) in cfg.radii.iter().enumerate() {
        let r = T::of(rf);
        let v = local_set(x_set, x, r)?;
        let w = box_around(u, r)?;
        let ri = ri as u64;
        let samples: Vec<Result<(T, Option<(Vec<T>, Vec<T>, Vec<T>)>)>> = (0..cfg.pairs_per_radius)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(cfg.seed, ri, i as u64);
                let a = point_in(&v, &mut rng);
                let b = point_in(&v, &mut rng);
                let (ratio, up) = pair_ratio(s, &a, &b, &w, cfg.set_discretization, &mut rng)
                    .map_err(|e| e.context(&format!("radius {rf}, pair {i}")))?;
                Ok((ratio, up.map(|up| (a, b, up))))
            })
            .collect();
        let mut found = Vec::new();
        for sample in samples {
            let (ratio, data) = sample?;
            if let Some(d) = data {
                found.push((ratio, d));
            }
        }
        let (ratio, best) = match best_by(found) {
            Some((ratio, (a, b, up))) => {
                let (ratio, a, b, up) = hill_climb(s, &v, &w, (ratio, a, b, up), r, cfg, ri)?;
                (ratio, Some((a, b, up)))
            }
            None => (T::zero(), None),
        };
        lower_bounds.push(RadiusBound { radius: r, ratio });
        witness = best.map(|(a, b, up)| Witness { x: a, xp: b, up, radius: r, kappa, ratio });
    }
    let trend = trend_of(&lower_bounds);
    let estimate = lower_bounds.last().map_or(T::zero(), |b| b.ratio);
    Ok(EstimateReport { lower_bounds, trend, witness, verdict: verdict_of(estimate, kappa) })
}

/// Result of re-evaluating a witness.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay<T> {
    /// `x, x' ∈ X ∩ V`, `u' ∈ S(x') ∩ W`.
    pub valid: bool,
    pub ratio: T,
    /// `d(u', S(x)) > κ‖x' - x‖` for the witness's `κ`.
    pub violates: bool,
}

/// Recomputes a witness from scratch, relative to the neighbourhoods of its radius.
pub fn replay_witness<T: Scalar, S: SetValuedMap<T> + ?Sized>(
    s: &S,
    x_set: &HPolyhedron<T>,
    x: &[T],
    u: &[T],
    w: &Witness<T>,
) -> Result<Replay<T>> {
    if w.x.len() != s.input_dim() || w.xp.len() != s.input_dim() || w.up.len() != s.output_dim() {
        return Err(Error::Schema("witness dimensions do not match the mapping".into()));
    }
    let tol = Tol::<T>::current();
    let v = local_set(x_set, x, w.radius * (T::one() + tol.tau))?;
    let wb = box_around(u, w.radius * (T::one() + tol.tau))?;
    let sxp = s.value(&w.xp)?;
    let valid = v.contains(&w.x) && v.contains(&w.xp) && wb.contains(&w.up) && sxp.contains(&w.up);
    let d = dist(&w.x, &w.xp);
    let sx = s.value(&w.x)?;
    let ratio = if d <= T::epsilon() { T::zero() } else { sx.distance(&w.up)? / d };
    let violates = match w.kappa {
        Some(k) => ratio > k,
        None => false,
    };
    Ok(Replay { valid, ratio, violates })
}
