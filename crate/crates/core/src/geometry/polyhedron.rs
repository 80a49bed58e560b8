use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::dd::polyhedron_generators;
use crate::geometry::face::Face;
use crate::linalg::{add, dist, dot, norm, norm_inf, orthonormal_span, sub};
use crate::lp::{Lp, LpOutcome};
use crate::qp;
use crate::scalar::Scalar;
use crate::tolerance::Tol;

/// Default cap on the number of active-set closures explored by face enumeration.
pub const FACE_BUDGET: usize = 1 << 20;

/// Generator description `conv(vertices) + cone(rays) + span(lineality)`.
///
/// For polyhedra with lineality the vertices live in the orthogonal complement of the
/// lineality space.
#[derive(Clone, Debug, PartialEq)]
pub struct VRep<T> {
    pub dim: usize,
    pub vertices: Vec<Vec<T>>,
    pub rays: Vec<Vec<T>>,
    pub lineality: Vec<Vec<T>>,
}

impl<T: Scalar> VRep<T> {
    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// A point in the relative interior: vertex barycentre plus the sum of the rays.
    pub fn relint_point(&self) -> Option<Vec<T>> {
        if self.vertices.is_empty() {
            return None;
        }
        let k = T::from_usize(self.vertices.len()).unwrap();
        let mut p = vec![T::zero(); self.dim];
        for v in &self.vertices {
            for (pi, vi) in p.iter_mut().zip(v) {
                *pi += *vi / k;
            }
        }
        for r in &self.rays {
            p = add(&p, r);
        }
        Some(p)
    }
}

/// `{x ∈ ℝⁿ : A x ≤ b, C x = d}` in canonical form.
///
/// Rows are scaled to unit norm, zero rows dropped and duplicates merged on construction;
/// emptiness is decided once by a phase-1 solve. The generator description is computed
/// lazily and cached.
#[derive(Clone, Debug)]
pub struct HPolyhedron<T> {
    dim: usize,
    a: Vec<Vec<T>>,
    b: Vec<T>,
    c: Vec<Vec<T>>,
    d: Vec<T>,
    empty: bool,
    vrep: OnceLock<Option<VRep<T>>>,
}

impl<T: Scalar> PartialEq for HPolyhedron<T> {
    fn eq(&self, o: &Self) -> bool {
        self.dim == o.dim && self.a == o.a && self.b == o.b && self.c == o.c && self.d == o.d
    }
}

impl<T: Scalar> HPolyhedron<T> {
    pub fn new(dim: usize, a: Vec<Vec<T>>, b: Vec<T>, c: Vec<Vec<T>>, d: Vec<T>) -> Result<Self> {
        if a.len() != b.len() || c.len() != d.len() {
            return Err(Error::Schema("row count and right-hand side length differ".into()));
        }
        if a.iter().chain(c.iter()).any(|r| r.len() != dim) {
            return Err(Error::Schema(format!("constraint row length differs from dimension {dim}")));
        }
        if a.iter().chain(c.iter()).flatten().chain(b.iter()).chain(d.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Schema("non-finite constraint data".into()));
        }
        let tol = Tol::<T>::current();
        let mut empty = false;
        let mut na: Vec<Vec<T>> = Vec::new();
        let mut nb: Vec<T> = Vec::new();
        for (ai, bi) in a.into_iter().zip(b) {
            let nr = norm(&ai);
            if nr <= tol.tau {
                if bi < -tol.tau {
                    empty = true;
                }
                continue;
            }
            let ai: Vec<T> = ai.iter().map(|x| *x / nr).collect();
            let bi = bi / nr;
            if let Some(j) = na.iter().position(|r| same_row(r, &ai, tol.tau)) {
                if bi < nb[j] {
                    nb[j] = bi;
                }
            } else {
                na.push(ai);
                nb.push(bi);
            }
        }
        let mut nc: Vec<Vec<T>> = Vec::new();
        let mut nd: Vec<T> = Vec::new();
        for (ci, di) in c.into_iter().zip(d) {
            let nr = norm(&ci);
            if nr <= tol.tau {
                if di.abs() > tol.tau {
                    empty = true;
                }
                continue;
            }
            let lead = ci.iter().find(|x| x.abs() > tol.tau).copied().unwrap_or(T::one());
            let s = if lead < T::zero() { -T::one() / nr } else { T::one() / nr };
            let ci: Vec<T> = ci.iter().map(|x| *x * s).collect();
            let di = di * s;
            if let Some(j) = nc.iter().position(|r| same_row(r, &ci, tol.tau)) {
                if (nd[j] - di).abs() > tol.tau {
                    empty = true;
                }
            } else {
                nc.push(ci);
                nd.push(di);
            }
        }
        if !empty {
            let lp = Lp::new(dim, &na, &nb, &nc, &nd);
            empty = lp.feasible_point().is_none();
        }
        Ok(HPolyhedron { dim, a: na, b: nb, c: nc, d: nd, empty, vrep: OnceLock::new() })
    }

    pub fn inequalities(dim: usize, a: Vec<Vec<T>>, b: Vec<T>) -> Result<Self> {
        Self::new(dim, a, b, Vec::new(), Vec::new())
    }

    /// All of `ℝⁿ`.
    pub fn full(dim: usize) -> Self {
        Self::new(dim, Vec::new(), Vec::new(), Vec::new(), Vec::new()).expect("valid")
    }

    /// The nonnegative orthant `ℝⁿ₊`.
    pub fn orthant(dim: usize) -> Self {
        let a = (0..dim)
            .map(|i| {
                let mut r = vec![T::zero(); dim];
                r[i] = -T::one();
                r
            })
            .collect();
        Self::inequalities(dim, a, vec![T::zero(); dim]).expect("valid")
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn boxed(lo: &[T], hi: &[T]) -> Result<Self> {
        let n = lo.len();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..n {
            let mut r = vec![T::zero(); n];
            r[i] = T::one();
            a.push(r.clone());
            b.push(hi[i]);
            r[i] = -T::one();
            a.push(r);
            b.push(-lo[i]);
        }
        Self::inequalities(n, a, b)
    }

    /// The single point `{p}`.
    pub fn point(p: &[T]) -> Self {
        let n = p.len();
        let c = (0..n)
            .map(|i| {
                let mut r = vec![T::zero(); n];
                r[i] = T::one();
                r
            })
            .collect();
        Self::new(n, Vec::new(), Vec::new(), c, p.to_vec()).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &[Vec<T>] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn c(&self) -> &[Vec<T>] {
        &self.c
    }

    pub fn d(&self) -> &[T] {
        &self.d
    }

    pub fn n_ineq(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Membership with the active tolerance.
    pub fn contains(&self, x: &[T]) -> bool {
        let tol = Tol::<T>::current();
        !self.empty
            && self.a.iter().zip(&self.b).all(|(ai, bi)| dot(ai, x) <= *bi + tol.rel(*bi))
            && self.c.iter().zip(&self.d).all(|(ci, di)| (dot(ci, x) - *di).abs() <= tol.rel(*di))
    }

    /// `b - A x`
    pub fn slacks(&self, x: &[T]) -> Vec<T> {
        self.a.iter().zip(&self.b).map(|(ai, bi)| *bi - dot(ai, x)).collect()
    }

    /// Inequality rows tight at `x`.
    pub fn active_set(&self, x: &[T]) -> Vec<usize> {
        let tol = Tol::<T>::current();
        self.slacks(x)
            .iter()
            .enumerate()
            .filter(|(i, s)| s.abs() <= tol.rel(self.b[*i]))
            .map(|(i, _)| i)
            .collect()
    }

    /// Membership in the relative interior: inside, with every non-implicit row strictly slack.
    pub fn relint_contains(&self, x: &[T]) -> bool {
        if !self.contains(x) {
            return false;
        }
        let implicit = self.implicit_equalities();
        let tol = Tol::<T>::current();
        self.slacks(x)
            .iter()
            .enumerate()
            .all(|(i, s)| implicit.contains(&i) || *s > tol.rel(self.b[i]))
    }

    /// Generator description, `None` if empty.
    pub fn vrep(&self) -> Option<&VRep<T>> {
        self.vrep
            .get_or_init(|| {
                if self.empty {
                    return None;
                }
                match polyhedron_generators(self.dim, &self.a, &self.b, &self.c, &self.d) {
                    Ok(Some((vertices, rays, lineality))) => Some(VRep { dim: self.dim, vertices, rays, lineality }),
                    _ => None,
                }
            })
            .as_ref()
    }

    /// Inequality rows that hold with equality on the whole polyhedron.
    pub fn implicit_equalities(&self) -> BTreeSet<usize> {
        match self.vrep() {
            None => (0..self.a.len()).collect(),
            Some(v) => {
                let inc = Incidence::new(self, v);
                inc.closure(&inc.all_vertices(), &inc.all_rays())
            }
        }
    }

    pub fn relint_point(&self) -> Option<Vec<T>> {
        self.vrep().and_then(|v| v.relint_point())
    }

    /// Orthonormal basis of the direction space of the affine hull.
    pub fn hull_directions(&self) -> Vec<Vec<T>> {
        let Some(v) = self.vrep() else { return Vec::new() };
        let mut dirs: Vec<Vec<T>> = v.vertices.iter().skip(1).map(|w| sub(w, &v.vertices[0])).collect();
        dirs.extend(v.rays.iter().cloned());
        dirs.extend(v.lineality.iter().cloned());
        orthonormal_span(&dirs, Tol::<T>::current().tau)
    }

    pub fn affine_dim(&self) -> Option<usize> {
        if self.empty {
            None
        } else {
            Some(self.hull_directions().len())
        }
    }

    /// Same polyhedron with the listed inequality rows turned into equalities.
    pub fn with_tight(&self, rows: &[usize]) -> Result<Self> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut c = self.c.clone();
        let mut d = self.d.clone();
        for i in 0..self.a.len() {
            if rows.contains(&i) {
                c.push(self.a[i].clone());
                d.push(self.b[i]);
            } else {
                a.push(self.a[i].clone());
                b.push(self.b[i]);
            }
        }
        Self::new(self.dim, a, b, c, d)
    }

    pub fn intersect(&self, o: &Self) -> Result<Self> {
        if o.dim != self.dim {
            return Err(Error::Schema("dimension mismatch in intersection".into()));
        }
        Self::new(
            self.dim,
            self.a.iter().chain(&o.a).cloned().collect(),
            self.b.iter().chain(&o.b).cloned().collect(),
            self.c.iter().chain(&o.c).cloned().collect(),
            self.d.iter().chain(&o.d).cloned().collect(),
        )
    }

    /// `self × other` in `ℝⁿ × ℝᵐ`.
    pub fn product(&self, o: &Self) -> Result<Self> {
        let n = self.dim;
        let m = o.dim;
        let lift_l = |r: &Vec<T>| {
            let mut v = r.clone();
            v.extend(std::iter::repeat_n(T::zero(), m));
            v
        };
        let lift_r = |r: &Vec<T>| {
            let mut v = vec![T::zero(); n];
            v.extend_from_slice(r);
            v
        };
        Self::new(
            n + m,
            self.a.iter().map(lift_l).chain(o.a.iter().map(lift_r)).collect(),
            self.b.iter().chain(&o.b).cloned().collect(),
            self.c.iter().map(lift_l).chain(o.c.iter().map(lift_r)).collect(),
            self.d.iter().chain(&o.d).cloned().collect(),
        )
    }

    /// `{u : (x, u) ∈ self}` for a polyhedron in `ℝⁿ × ℝᵐ`.
    pub fn slice(&self, x: &[T]) -> Result<Self> {
        let n = x.len();
        if n > self.dim {
            return Err(Error::Schema("slice point longer than dimension".into()));
        }
        let m = self.dim - n;
        let a = self.a.iter().map(|r| r[n..].to_vec()).collect();
        let b = self.a.iter().zip(&self.b).map(|(r, bi)| *bi - dot(&r[..n], x)).collect();
        let c = self.c.iter().map(|r| r[n..].to_vec()).collect();
        let d = self.c.iter().zip(&self.d).map(|(r, di)| *di - dot(&r[..n], x)).collect();
        Self::new(m, a, b, c, d)
    }

    /// Recession (horizon) cone `{w : A w ≤ 0, C w = 0}`.
    pub fn recession_cone(&self) -> Self {
        Self::new(self.dim, self.a.clone(), vec![T::zero(); self.a.len()], self.c.clone(), vec![T::zero(); self.c.len()])
            .expect("valid")
    }

    /// Nearest point and certificate. `Error::Domain` when empty.
    pub fn project(&self, x: &[T]) -> Result<Projection<T>> {
        if self.empty {
            return Err(Error::Domain("projection onto an empty polyhedron".into()));
        }
        let sol = qp::project(x, &self.a, &self.b, &self.c, &self.d)?;
        let active = self.active_set(&sol.point);
        let distance = dist(x, &sol.point);
        Ok(Projection { point: sol.point, distance, active, lambda: sol.lambda, mu: sol.mu })
    }

    /// `d(x, P)`, `+∞` for the empty set.
    pub fn distance(&self, x: &[T]) -> Result<T> {
        if self.empty {
            return Ok(T::infinity());
        }
        Ok(self.project(x)?.distance)
    }

    /// Support function value and the exposed face where it is attained.
    pub fn support(&self, x: &[T]) -> Support<T> {
        let Some(v) = self.vrep() else {
            return Support { value: T::neg_infinity(), face: None };
        };
        let tol = Tol::<T>::current();
        let scale = norm(x).max(T::one());
        if v.rays.iter().any(|r| dot(r, x) > tol.tau * scale)
            || v.lineality.iter().any(|l| dot(l, x).abs() > tol.tau * scale)
        {
            return Support { value: T::infinity(), face: None };
        }
        let vals: Vec<T> = v.vertices.iter().map(|w| dot(w, x)).collect();
        let best = vals.iter().cloned().fold(T::neg_infinity(), T::max);
        let inc = Incidence::new(self, v);
        let vs: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= best - tol.rel(best)).collect();
        let rs: Vec<usize> = (0..v.rays.len()).filter(|&i| dot(&v.rays[i], x).abs() <= tol.tau * scale).collect();
        let active: Vec<usize> = inc.closure(&inc.vertex_bits(&vs), &inc.ray_bits(&rs)).into_iter().collect();
        let face = Face::new(Arc::new(self.clone()), active).ok();
        Support { value: best, face }
    }

    /// All nonempty faces, ordered lexicographically by active set.
    pub fn faces(&self, budget: usize) -> Result<Vec<Face<T>>> {
        let Some(v) = self.vrep() else { return Ok(Vec::new()) };
        let inc = Incidence::new(self, v);
        let root: Vec<usize> = inc.closure(&inc.all_vertices(), &inc.all_rays()).into_iter().collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        seen.insert(root.clone());
        queue.push_back(root);
        let mut work = 0usize;
        while let Some(act) = queue.pop_front() {
            for j in 0..self.a.len() {
                if act.binary_search(&j).is_ok() {
                    continue;
                }
                work += 1;
                if work > budget {
                    return Err(Error::Budget(format!("face enumeration exceeded {budget} closures")));
                }
                let mut s = act.clone();
                s.push(j);
                let (vb, rb) = inc.generators_on(&s);
                if !vb.iter().any(|&x| x) {
                    continue;
                }
                let cl: Vec<usize> = inc.closure(&vb, &rb).into_iter().collect();
                if seen.insert(cl.clone()) {
                    queue.push_back(cl);
                }
            }
        }
        let mut sets: Vec<Vec<usize>> = seen.into_iter().collect();
        sets.sort();
        let parent = Arc::new(self.clone());
        sets.into_iter().map(|s| Face::new(parent.clone(), s)).collect()
    }

    /// The face whose relative interior contains `x`.
    pub fn face_of_relint(&self, x: &[T]) -> Result<Face<T>> {
        if !self.contains(x) {
            return Err(Error::Domain("point not in polyhedron".into()));
        }
        Face::new(Arc::new(self.clone()), self.active_set(x))
    }

    /// A feasible point from the phase-1 solve.
    pub fn some_point(&self) -> Option<Vec<T>> {
        if self.empty {
            return None;
        }
        Lp::new(self.dim, &self.a, &self.b, &self.c, &self.d).feasible_point()
    }

    /// `max ⟨obj, x⟩` by the simplex method (independent of the generator description).
    pub fn lp_max(&self, obj: &[T]) -> LpOutcome<T> {
        if self.empty {
            return LpOutcome::Infeasible;
        }
        Lp::new(self.dim, &self.a, &self.b, &self.c, &self.d).maximize(obj)
    }

    /// Polyhedron from generators (`conv V + cone R + span L`).
    pub fn from_vrep(v: &VRep<T>) -> Result<Self> {
        crate::geometry::vrep_to_hrep(v)
    }
}

fn same_row<T: Scalar>(a: &[T], b: &[T], eps: T) -> bool {
    a.iter().zip(b).all(|(x, y)| (*x - *y).abs() <= eps)
}

#[derive(Clone, Debug)]
pub struct Projection<T> {
    pub point: Vec<T>,
    pub distance: T,
    /// Inequality rows tight at the projection.
    pub active: Vec<usize>,
    /// Multipliers certifying `x - p = Aᵀλ + Cᵀμ`, `λ ≥ 0`.
    pub lambda: Vec<T>,
    pub mu: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct Support<T> {
    /// `σ_P(x)`, possibly `±∞`.
    pub value: T,
    /// `argmax_{p∈P} ⟨p, x⟩` when the value is finite.
    pub face: Option<Face<T>>,
}

/// Row/generator incidence used for face closures.
pub(crate) struct Incidence {
    /// tight_v[i][k]: row i tight at vertex k
    tight_v: Vec<Vec<bool>>,
    tight_r: Vec<Vec<bool>>,
    nv: usize,
    nr: usize,
}

impl Incidence {
    pub(crate) fn new<T: Scalar>(p: &HPolyhedron<T>, v: &VRep<T>) -> Self {
        let tol = Tol::<T>::current();
        let eps = tol.tau * T::of(10.0);
        let tight_v = p
            .a
            .iter()
            .zip(&p.b)
            .map(|(ai, bi)| {
                v.vertices
                    .iter()
                    .map(|w| (*bi - dot(ai, w)).abs() <= eps * bi.abs().max(norm_inf(w)).max(T::one()))
                    .collect()
            })
            .collect();
        let tight_r = p.a.iter().map(|ai| v.rays.iter().map(|r| dot(ai, r).abs() <= eps).collect()).collect();
        Incidence { tight_v, tight_r, nv: v.vertices.len(), nr: v.rays.len() }
    }

    fn all_vertices(&self) -> Vec<bool> {
        vec![true; self.nv]
    }

    fn all_rays(&self) -> Vec<bool> {
        vec![true; self.nr]
    }

    fn vertex_bits(&self, idx: &[usize]) -> Vec<bool> {
        (0..self.nv).map(|k| idx.contains(&k)).collect()
    }

    fn ray_bits(&self, idx: &[usize]) -> Vec<bool> {
        (0..self.nr).map(|k| idx.contains(&k)).collect()
    }

    /// Generators satisfying every row of `rows` with equality.
    pub(crate) fn generators_on(&self, rows: &[usize]) -> (Vec<bool>, Vec<bool>) {
        let vb = (0..self.nv).map(|k| rows.iter().all(|&i| self.tight_v[i][k])).collect();
        let rb = (0..self.nr).map(|k| rows.iter().all(|&i| self.tight_r[i][k])).collect();
        (vb, rb)
    }

    /// Rows tight on every selected generator.
    pub(crate) fn closure(&self, vb: &[bool], rb: &[bool]) -> BTreeSet<usize> {
        (0..self.tight_v.len())
            .filter(|&i| {
                (0..self.nv).all(|k| !vb[k] || self.tight_v[i][k]) && (0..self.nr).all(|k| !rb[k] || self.tight_r[i][k])
            })
            .collect()
    }
}
