//! Difference quotients `|h(x) - h(x')| / ‖x - x'‖` of a black-box function over sampled
//! pairs in `X` near `x̄`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::HPolyhedron;
use crate::linalg::dist;
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::tolerance::Tol;

use super::{best_by, local_set, point_in, trend_of, verdict_of, EstimateReport, RadiusBound, SampleConfig};

/// A function `ℝⁿ → ℝ ∪ {+∞}` given by a closure; `+∞` marks points outside the domain.
pub struct FnBox<F> {
    pub n: usize,
    pub f: F,
}

impl<F> FnBox<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnBox { n, f }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionWitness<T> {
    pub x: Vec<T>,
    pub xp: Vec<T>,
    pub radius: T,
    pub ratio: T,
    /// A sampled value was not finite: `X` leaves the domain near `x̄`.
    pub outside_domain: bool,
}

fn quotient<T: Scalar, F: Fn(&[T]) -> T>(h: &F, a: &[T], b: &[T]) -> (T, bool) {
    let d = dist(a, b);
    let (fa, fb) = (h(a), h(b));
    if !fa.is_finite() || !fb.is_finite() {
        return (T::infinity(), true);
    }
    if d <= T::epsilon() {
        return (T::zero(), false);
    }
    ((fa - fb).abs() / d, false)
}

/// Per-radius lower bounds on `lip_X h(x̄)`.
pub fn estimate_function_modulus<T: Scalar, F: Fn(&[T]) -> T + Sync>(
    h: &FnBox<F>,
    x_set: &HPolyhedron<T>,
    x: &[T],
    cfg: &SampleConfig,
    kappa: Option<T>,
) -> Result<EstimateReport<T, FunctionWitness<T>>> {
    cfg.validate()?;
    if x.len() != h.n || x_set.dim() != h.n {
        return Err(Error::Schema("point, set and function dimensions disagree".into()));
    }
    if !x_set.contains(x) {
        return Err(Error::Domain("x̄ is not in X".into()));
    }
    let f = &h.f;
    let mut lower_bounds = Vec::new();
    let mut witness = None;
    for (ri, &rf) in cfg.radii.iter().enumerate() {
        let r = T::of(rf);
        let v = local_set(x_set, x, r)?;
        let ri = ri as u64;
        let samples: Vec<(T, (Vec<T>, Vec<T>, bool))> = (0..cfg.pairs_per_radius)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(cfg.seed, ri, i as u64);
                let a = point_in(&v, &mut rng);
                let b = point_in(&v, &mut rng);
                let (q, out) = quotient(f, &a, &b);
                (q, (a, b, out))
            })
            .collect();
        let (mut best, (mut a, mut b, mut out)) = best_by(samples).expect("at least one pair");
        if !out {
            let mut step = r * T::of(0.25);
            let mut fails = 0;
            for k in 0..cfg.refine_steps {
                let mut rng = stream(cfg.seed, ri, (cfg.pairs_per_radius + k) as u64);
                let which = rng.gen_range(0..3);
                let mut cand = [a.clone(), b.clone()];
                for (j, p) in cand.iter_mut().enumerate() {
                    if which == 2 || which == j {
                        let moved: Vec<T> = p.iter().map(|c| *c + step * T::of(rng.gen_range(-1.0..1.0))).collect();
                        *p = v.project(&moved)?.point;
                    }
                }
                let (q, o) = quotient(f, &cand[0], &cand[1]);
                if q > best {
                    best = q;
                    out = o;
                    [a, b] = cand;
                    fails = 0;
                    if out {
                        break;
                    }
                    continue;
                }
                fails += 1;
                if fails >= 8 {
                    step *= T::of(0.5);
                    fails = 0;
                }
            }
        }
        lower_bounds.push(RadiusBound { radius: r, ratio: best });
        witness = Some(FunctionWitness { x: a, xp: b, radius: r, ratio: best, outside_domain: out });
    }
    let trend = trend_of(&lower_bounds);
    let estimate = lower_bounds.last().map_or(T::zero(), |b| b.ratio);
    Ok(EstimateReport { lower_bounds, trend, witness, verdict: verdict_of(estimate, kappa) })
}

/// Difference quotients along given pairs, in order.
pub fn ratio_along_pairs<T: Scalar, F: Fn(&[T]) -> T>(h: &FnBox<F>, pairs: &[(Vec<T>, Vec<T>)]) -> Vec<T> {
    pairs.iter().map(|(a, b)| quotient(&h.f, a, b).0).collect()
}

/// `h(x) = ‖x‖ + x₂` on `{x₂ ≤ 0}`: the support function of the disk of radius one centred at
/// `(0, 1)` with its upper half extended vertically. Its modulus at the origin relative to the
/// domain is `√2`.
pub fn disk_example<T: Scalar>() -> (FnBox<impl Fn(&[T]) -> T + Sync>, HPolyhedron<T>) {
    let f = |x: &[T]| {
        if x[1] > Tol::<T>::current().tau {
            return T::infinity();
        }
        let x1 = x[1].min(T::zero());
        (x[0] * x[0] + x1 * x1).sqrt() + x1
    };
    let dom = HPolyhedron::inequalities(2, vec![vec![T::zero(), T::one()]], vec![T::zero()]).expect("half-plane");
    (FnBox::new(2, f), dom)
}

/// `h(x) = -√(2x₁x₂)` on the nonpositive orthant: the support function of the region above the
/// hyperbola `x₁x₂ = 1` in the positive orthant. It is continuous on its domain but not
/// Lipschitz at the origin.
pub fn hyperbola_example<T: Scalar>() -> (FnBox<impl Fn(&[T]) -> T + Sync>, HPolyhedron<T>) {
    let f = |x: &[T]| {
        let tau = Tol::<T>::current().tau;
        if x[0] > tau || x[1] > tau {
            return T::infinity();
        }
        -(T::of(2.0) * x[0].min(T::zero()) * x[1].min(T::zero())).sqrt()
    };
    let dom = HPolyhedron::inequalities(2, vec![vec![T::one(), T::zero()], vec![T::zero(), T::one()]], vec![T::zero(), T::zero()])
        .expect("orthant");
    (FnBox::new(2, f), dom)
}
