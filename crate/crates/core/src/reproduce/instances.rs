//! Seeded random instances: cones, polyhedra, linear systems, LCPs, piecewise-linear functions
//! and polyhedral sets for support functions. Entries are small integers so that degenerate
//! configurations (shared faces, parallel rows) come up often.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::functions::{PlCell, PlFunction};
use crate::geometry::{HPolyhedron, PolyCone};
use crate::linalg::{dot, Mat};
use crate::lp::LpOutcome;
use crate::stratified::{build_linear_system, StratifiedMapping};

pub fn int_vec<R: Rng>(rng: &mut R, n: usize, lo: i32, hi: i32) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi) as f64).collect()
}

fn nonzero_vec<R: Rng>(rng: &mut R, n: usize, lo: i32, hi: i32) -> Vec<f64> {
    loop {
        let v = int_vec(rng, n, lo, hi);
        if v.iter().any(|x| *x != 0.0) {
            return v;
        }
    }
}

/// A cone in `ℝᵈ` generated by up to `d + 2` integer rays and, one time in four, a lineality
/// direction.
pub fn cone<R: Rng>(rng: &mut R, dim: usize) -> PolyCone<f64> {
    let k = rng.gen_range(1..=dim + 2);
    let rays = (0..k).map(|_| nonzero_vec(rng, dim, -3, 3)).collect();
    let lin = if dim > 1 && rng.gen_bool(0.25) { vec![nonzero_vec(rng, dim, -2, 2)] } else { Vec::new() };
    PolyCone::from_g(dim, rays, lin)
}

/// A full-dimensional polyhedron in `ℝᵈ` with `center` in its interior; bounded or not.
pub fn polyhedron<R: Rng>(rng: &mut R, dim: usize, center: &[f64]) -> HPolyhedron<f64> {
    let k = rng.gen_range(1..=dim + 3);
    let a: Vec<Vec<f64>> = (0..k).map(|_| nonzero_vec(rng, dim, -2, 2)).collect();
    let b = a.iter().map(|r| dot(r, center) + rng.gen_range(1..=3) as f64).collect();
    HPolyhedron::inequalities(dim, a, b).expect("well-formed rows")
}

/// A point of `p` on its boundary when it has one: a vertex if there are any, otherwise a
/// maximiser of a random row, otherwise an interior point.
pub fn boundary_point<R: Rng>(rng: &mut R, p: &HPolyhedron<f64>) -> Vec<f64> {
    if let Some(v) = p.vrep() {
        if let Some(w) = v.vertices.choose(rng) {
            if !p.a().is_empty() && v.rays.is_empty() && v.lineality.is_empty() || rng.gen_bool(0.5) {
                return w.clone();
            }
        }
    }
    if let Some(row) = p.a().choose(rng) {
        if let LpOutcome::Optimal { x, .. } = p.lp_max(row) {
            return x;
        }
    }
    p.relint_point().expect("nonempty")
}

/// A linear system `p ↦ {x : A x + p ∈ K}` with `dom S ≠ ℝᵐ`, a boundary point and an
/// interior point of `dom S`, each paired with a solution.
#[derive(Clone, Debug)]
pub struct LinSys {
    pub a: Vec<Vec<f64>>,
    pub k: HPolyhedron<f64>,
    pub s: StratifiedMapping<f64>,
    pub dom: HPolyhedron<f64>,
    pub boundary: (Vec<f64>, Vec<f64>),
    pub interior: (Vec<f64>, Vec<f64>),
}

pub fn linear_system<R: Rng>(rng: &mut R) -> Result<LinSys> {
    for _ in 0..200 {
        let m = rng.gen_range(2..=4);
        let n = rng.gen_range(1..m.min(4));
        let a: Vec<Vec<f64>> = (0..m).map(|_| int_vec(rng, n, -2, 2)).collect();
        let k = polyhedron(rng, m, &vec![0.0; m]);
        let s = build_linear_system(&a, &k)?;
        let dom = s.domain().expect("linear systems know their domain").clone();
        if dom.a().is_empty() {
            continue;
        }
        let am = Mat::from_rows(&a, n);
        // boundary: maximise a facet row of dom S
        let row = dom.a().choose(rng).expect("nonempty").clone();
        let LpOutcome::Optimal { x: pb, .. } = dom.lp_max(&row) else { continue };
        let Some(xb) = solution(&s, &pb) else { continue };
        // interior: a boundary point of K shifted by A x₀, kept only if it lands inside dom S
        let x0 = int_vec(rng, n, -1, 1);
        let kb = boundary_point(rng, &k);
        let ax0 = am.mul_vec(&x0);
        let pi: Vec<f64> = kb.iter().zip(&ax0).map(|(kk, ax)| kk - ax).collect();
        let interior = if dom.slacks(&pi).iter().all(|s| *s > 1e-6) {
            (pi, x0)
        } else {
            let p = dom.relint_point().expect("nonempty");
            let Some(x) = solution(&s, &p) else { continue };
            (p, x)
        };
        return Ok(LinSys { a, k, s, dom, boundary: (pb, xb), interior });
    }
    Err(Error::Numerical("no linear system with a proper domain found".into()))
}

fn solution(s: &StratifiedMapping<f64>, p: &[f64]) -> Option<Vec<f64>> {
    let value = s.evaluate(p).ok()?;
    let piece = value.first()?;
    piece.vrep().and_then(|v| v.vertices.first().cloned()).or_else(|| piece.some_point())
}

/// An `m × m` LCP matrix with entries in `[-2, 2]`.
pub fn lcp_matrix<R: Rng>(rng: &mut R, m: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| int_vec(rng, m, -2, 2)).collect()
}

/// `max_i (⟨gᵢ, x⟩ + cᵢ)`, on a random polyhedral domain one time in two, in `ℝ¹` or `ℝ²`.
/// Returns the function and a point of its domain on a kink or on the domain boundary.
pub fn pl_function<R: Rng>(rng: &mut R) -> Result<(PlFunction<f64>, Vec<f64>)> {
    let n = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=3);
    let pieces: Vec<(Vec<f64>, f64)> = (0..k).map(|_| (int_vec(rng, n, -3, 3), rng.gen_range(-1..=1) as f64)).collect();
    let base = PlFunction::max_affine(&pieces)?;
    let dom = if rng.gen_bool(0.5) { Some(polyhedron(rng, n, &vec![0.0; n])) } else { None };
    let cells: Vec<PlCell<f64>> = match &dom {
        Some(d) => base
            .cells
            .iter()
            .map(|c| Ok(PlCell { set: c.set.intersect(d)?, g: c.g.clone(), c: c.c }))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|c| !c.set.is_empty())
            .collect(),
        None => base.cells.clone(),
    };
    let f = PlFunction::new(n, cells)?;
    // a point where several cells meet, or a domain vertex
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for c in &f.cells {
        if let Some(v) = c.set.vrep() {
            candidates.extend(v.vertices.iter().cloned());
        }
    }
    let x = match candidates.choose(rng) {
        Some(x) if rng.gen_bool(0.8) => x.clone(),
        _ => f.cells[0].set.relint_point().expect("nonempty cell"),
    };
    Ok((f, x))
}

/// A nonempty polyhedron `D` in `ℝ²` or `ℝ³` for a support function: a polytope, an
/// unbounded set, or (one time in four) a set with a lineality direction.
pub fn support_set<R: Rng>(rng: &mut R) -> HPolyhedron<f64> {
    let n = rng.gen_range(2..=3);
    let center = int_vec(rng, n, -2, 2);
    match rng.gen_range(0..4) {
        0 => {
            // a slab-like set: every row orthogonal to a common direction
            let dir = nonzero_vec(rng, n, -1, 1);
            let mut rows: Vec<Vec<f64>> = Vec::new();
            while rows.len() < n {
                let r = nonzero_vec(rng, n, -2, 2);
                let t = dot(&r, &dir) / dot(&dir, &dir);
                let r: Vec<f64> = r.iter().zip(&dir).map(|(a, d)| a - t * d).collect();
                if r.iter().any(|x| x.abs() > 1e-9) {
                    rows.push(r);
                }
            }
            let b = rows.iter().map(|r| dot(r, &center) + rng.gen_range(1..=3) as f64).collect();
            HPolyhedron::inequalities(n, rows, b).expect("well-formed rows")
        }
        _ => polyhedron(rng, n, &center),
    }
}
