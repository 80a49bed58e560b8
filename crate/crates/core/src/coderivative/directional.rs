//! Directional limiting coderivatives and the sufficient condition built on them.

use crate::error::{Error, Result};
use crate::geometry::{tangent_cone, ConeUnion, HPolyhedron, PolyCone};
use crate::linalg::{concat, dot, norm, norm_inf, sub};
use crate::scalar::Scalar;
use crate::stratified::StratifiedMapping;
use crate::tolerance::Tol;

use super::{from_normal_cone, PhMap};

/// A direction `(x, u)` along which `D*S((x̄,ū);(x,u))(0) ≠ {0}`.
#[derive(Clone, Debug)]
pub struct FailingDirection<T> {
    pub x: Vec<T>,
    pub u: Vec<T>,
    /// `D*S((x̄,ū);(x,u))(0)` as a union of cones in `ℝⁿ`.
    pub kernel: ConeUnion<T>,
}

#[derive(Clone, Debug)]
pub struct DirectionalReport<T> {
    /// Every generator of `T_X(x̄)` lifts to a tangent direction of the graph.
    pub condition_i: bool,
    /// Directions examined, normalised to unit max-norm.
    pub directions: Vec<(Vec<T>, Vec<T>)>,
    /// All directions violating the kernel condition, in the order examined.
    pub failing: Vec<FailingDirection<T>>,
}

impl<T> DirectionalReport<T> {
    pub fn passed(&self) -> bool {
        self.condition_i && self.failing.is_empty()
    }
}

/// A point `z + t·d` whose stratum no longer changes as `t` halves.
fn settled_point<T: Scalar>(s: &StratifiedMapping<T>, z: &[T], d: &[T]) -> Result<Vec<T>> {
    let at = |t: T| -> Vec<T> { z.iter().zip(d).map(|(a, b)| *a + t * *b).collect() };
    let mut t = T::one();
    let mut prev: Option<usize> = None;
    for _ in 0..60 {
        let p = at(t);
        let cur = s.stratum_of(&p);
        if cur.is_some() && cur == prev {
            return Ok(at(t + t));
        }
        prev = cur;
        t *= T::of(0.5);
    }
    if prev.is_none() {
        return Err(Error::Domain("direction leaves the graph".into()));
    }
    Err(Error::Unsupported("strata do not settle along the direction".into()))
}

/// Directional limiting coderivative `D*S((x̄,ū);(x,u))`: the coderivative read off the
/// limiting normal cone at `(x̄,ū) + t(x,u)` for small `t > 0`.
pub fn directional_coderivative<T: Scalar>(
    s: &StratifiedMapping<T>,
    x: &[T],
    u: &[T],
    dx: &[T],
    du: &[T],
) -> Result<PhMap<T>> {
    let z = s.checked_point(x, u)?;
    if dx.len() != s.n || du.len() != s.m {
        return Err(Error::Schema("direction has the wrong dimensions".into()));
    }
    let d = concat(dx, du);
    if norm(&d) == T::zero() {
        return Ok(from_normal_cone(&s.limiting_normal_at(&z), s.n, s.m));
    }
    let p = settled_point(s, &z, &d)?;
    Ok(from_normal_cone(&s.limiting_normal_at(&p), s.n, s.m))
}

/// `{x* : (x*, 0) ∈ N}` piece by piece.
fn zero_slice<T: Scalar>(n: usize, m: usize, normal: &ConeUnion<T>) -> ConeUnion<T> {
    let fix: Vec<Vec<T>> = (0..m)
        .map(|j| {
            let mut r = vec![T::zero(); n + m];
            r[n + j] = T::one();
            r
        })
        .collect();
    let pieces = normal
        .pieces
        .iter()
        .map(|k| {
            let g = k.with_rows(&[], &fix).generators().clone();
            let cut = |v: &Vec<T>| v[..n].to_vec();
            PolyCone::from_g(n, g.rays.iter().map(cut).collect(), g.lineality.iter().map(cut).collect())
        })
        .collect();
    ConeUnion::new(n, pieces).pruned()
}

/// Whether `g` has a lift `(g, v)` tangent to some graph piece through `z`.
fn lifts<T: Scalar>(s: &StratifiedMapping<T>, z: &[T], g: &[T]) -> Result<bool> {
    for p in s.pieces().iter().filter(|p| p.contains(z)) {
        let split = |r: &Vec<T>| (dot(&r[..s.n], g), r[s.n..].to_vec());
        let (b, a): (Vec<T>, Vec<Vec<T>>) = p.active_set(z).iter().map(|&i| split(&p.a()[i])).map(|(v, r)| (-v, r)).unzip();
        let (d, c): (Vec<T>, Vec<Vec<T>>) = p.c().iter().map(split).map(|(v, r)| (-v, r)).unzip();
        if !HPolyhedron::new(s.m, a, b, c, d)?.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Checks the directional sufficient condition for the Lipschitz-like property of `S` relative
/// to `X` at `(x̄, ū)`.
///
/// Condition (i) is tested generator by generator on `T_X(x̄)`. Condition (ii) is tested on one
/// direction per refined graph cell adjacent to `(x̄, ū)`, which covers every stratum of the
/// tangent cone for graphs that are conic around the point.
pub fn directional_sufficiency_check<T: Scalar>(
    s: &StratifiedMapping<T>,
    x_set: &HPolyhedron<T>,
    x: &[T],
    u: &[T],
) -> Result<DirectionalReport<T>> {
    if !x_set.contains(x) {
        return Err(Error::Domain("x̄ is not in X".into()));
    }
    let z = s.checked_point(x, u)?;
    let tol = Tol::<T>::current();
    let t = tangent_cone(x_set, x)?;
    let g = t.generators();
    let mut condition_i = true;
    for v in g.rays.iter().cloned().chain(g.lineality.iter().flat_map(|l| [l.clone(), l.iter().map(|c| -*c).collect()])) {
        if !lifts(s, &z, &v)? {
            condition_i = false;
            break;
        }
    }
    let r = s.refine(x_set)?;
    let mut directions: Vec<(Vec<T>, Vec<T>)> = Vec::new();
    let mut failing = Vec::new();
    for c in r.adjacent(&z) {
        let d = sub(&r.cells[c].point, &z);
        let size = norm_inf(&d);
        if size <= tol.tau {
            continue;
        }
        let d: Vec<T> = d.iter().map(|v| *v / size).map(|v| if v.abs() <= tol.tau { T::zero() } else { v }).collect();
        let (dx, du) = (d[..s.n].to_vec(), d[s.n..].to_vec());
        if directions.iter().any(|(a, b)| norm_inf(&sub(a, &dx)).max(norm_inf(&sub(b, &du))) <= tol.tau) {
            continue;
        }
        directions.push((dx.clone(), du.clone()));
        let p = settled_point(s, &z, &d)?;
        let kernel = zero_slice(s.n, s.m, &s.limiting_normal_at(&p));
        if !kernel.is_zero() {
            failing.push(FailingDirection { x: dx, u: du, kernel });
        }
    }
    Ok(DirectionalReport { condition_i, directions, failing })
}
