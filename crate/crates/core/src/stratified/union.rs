use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{ConeUnion, HPolyhedron, VRep};
use crate::linalg::concat;
use crate::lp::{Lp, LpOutcome};
use crate::scalar::Scalar;
use crate::tolerance::Tol;

use super::refine::regular_normal;
use super::{Stratum, StratifiedMapping};

/// Default cap on linear programs solved while enumerating arrangement cells.
pub const UNION_BUDGET: usize = 1 << 16;

#[derive(Clone, Debug)]
struct Hyperplane<T> {
    a: Vec<T>,
    b: T,
}

fn collect_hyperplanes<T: Scalar>(polys: &[&HPolyhedron<T>]) -> Vec<Hyperplane<T>> {
    let eps = Tol::<T>::current().tau;
    let mut out: Vec<Hyperplane<T>> = Vec::new();
    let rows = polys
        .iter()
        .flat_map(|p| p.a().iter().zip(p.b()).chain(p.c().iter().zip(p.d())))
        .map(|(a, b)| (a.clone(), *b));
    for (mut a, mut b) in rows {
        let lead = a.iter().find(|x| x.abs() > eps).copied().unwrap_or(T::one());
        if lead < T::zero() {
            a.iter_mut().for_each(|x| *x = -*x);
            b = -b;
        }
        let same = |h: &Hyperplane<T>| (h.b - b).abs() <= eps && h.a.iter().zip(&a).all(|(x, y)| (*x - *y).abs() <= eps);
        if !out.iter().any(same) {
            out.push(Hyperplane { a, b });
        }
    }
    out
}

/// A relatively open cell of a hyperplane arrangement: its sign vector (`-1`, `0`, `1` for
/// `a·z < b`, `=`, `>`), closure, and a point of the cell.
pub(crate) struct ArrCell<T> {
    pub signs: Vec<i8>,
    pub closure: HPolyhedron<T>,
    pub point: Vec<T>,
}

struct Enumerator<'a, T> {
    dim: usize,
    hs: &'a [Hyperplane<T>],
    region: &'a HPolyhedron<T>,
    lps: usize,
    budget: usize,
}

impl<'a, T: Scalar> Enumerator<'a, T> {
    /// Largest common strict slack of the assigned signs inside the region, capped at one.
    fn slack(&mut self, signs: &[i8]) -> Result<Option<(T, Vec<T>)>> {
        self.lps += 1;
        if self.lps > self.budget {
            return Err(Error::Budget(format!("arrangement enumeration exceeded {} linear programs", self.budget)));
        }
        let d = self.dim;
        let mut a: Vec<Vec<T>> = self.region.a().iter().map(|r| concat(r, &[T::zero()])).collect();
        let mut b: Vec<T> = self.region.b().to_vec();
        let mut c: Vec<Vec<T>> = self.region.c().iter().map(|r| concat(r, &[T::zero()])).collect();
        let mut dd: Vec<T> = self.region.d().to_vec();
        for (h, &s) in self.hs.iter().zip(signs) {
            match s {
                0 => {
                    c.push(concat(&h.a, &[T::zero()]));
                    dd.push(h.b);
                }
                -1 => {
                    a.push(concat(&h.a, &[T::one()]));
                    b.push(h.b);
                }
                _ => {
                    a.push(concat(&h.a.iter().map(|x| -*x).collect::<Vec<T>>(), &[T::one()]));
                    b.push(-h.b);
                }
            }
        }
        let mut cap = vec![T::zero(); d + 1];
        cap[d] = T::one();
        a.push(cap.clone());
        b.push(T::one());
        match Lp::new(d + 1, &a, &b, &c, &dd).maximize(&cap) {
            LpOutcome::Optimal { x, value } => Ok(Some((value, x[..d].to_vec()))),
            _ => Ok(None),
        }
    }

    fn run(&mut self) -> Result<Vec<(Vec<i8>, Vec<T>)>> {
        let eps = Tol::<T>::current().tau * T::of(10.0);
        let mut out = Vec::new();
        let mut stack: Vec<Vec<i8>> = vec![Vec::new()];
        while let Some(signs) = stack.pop() {
            let Some((t, z)) = self.slack(&signs)? else { continue };
            if t <= eps {
                continue;
            }
            if signs.len() == self.hs.len() {
                out.push((signs, z));
                continue;
            }
            for s in [1i8, 0, -1] {
                let mut next = signs.clone();
                next.push(s);
                stack.push(next);
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        Ok(out)
    }
}

fn cell_closure<T: Scalar>(dim: usize, hs: &[Hyperplane<T>], signs: &[i8], region: &HPolyhedron<T>) -> Result<HPolyhedron<T>> {
    let mut a = region.a().to_vec();
    let mut b = region.b().to_vec();
    let mut c = region.c().to_vec();
    let mut d = region.d().to_vec();
    for (h, &s) in hs.iter().zip(signs) {
        match s {
            0 => {
                c.push(h.a.clone());
                d.push(h.b);
            }
            -1 => {
                a.push(h.a.clone());
                b.push(h.b);
            }
            _ => {
                a.push(h.a.iter().map(|x| -*x).collect());
                b.push(-h.b);
            }
        }
    }
    HPolyhedron::new(dim, a, b, c, d)
}

fn cells_in<T: Scalar>(
    dim: usize,
    hs: &[Hyperplane<T>],
    region: &HPolyhedron<T>,
    budget: &mut usize,
) -> Result<Vec<(Vec<i8>, Vec<T>)>> {
    let mut e = Enumerator { dim, hs, region, lps: 0, budget: *budget };
    let out = e.run()?;
    *budget -= e.lps;
    Ok(out)
}

/// Stratifies the mapping whose graph is `∪ pieces ⊂ ℝⁿ × ℝᵐ` by the cells of the hyperplane
/// arrangement of all piece rows. The limiting normal cone on a cell is the union of the
/// regular normal cones of the cells whose closure contains it.
pub fn stratify_union<T: Scalar>(n: usize, pieces: &[HPolyhedron<T>], budget: usize) -> Result<StratifiedMapping<T>> {
    let pieces: Vec<HPolyhedron<T>> = pieces.iter().filter(|p| !p.is_empty()).cloned().collect();
    let Some(first) = pieces.first() else {
        return Err(Error::Domain("the graph has no nonempty piece".into()));
    };
    let dim = first.dim();
    if pieces.iter().any(|p| p.dim() != dim) || n > dim {
        return Err(Error::Schema("pieces must share one ambient dimension n + m".into()));
    }
    let refs: Vec<&HPolyhedron<T>> = pieces.iter().collect();
    let hs = collect_hyperplanes(&refs);
    let mut left = budget;
    let mut seen: HashSet<Vec<i8>> = HashSet::new();
    let mut cells: Vec<ArrCell<T>> = Vec::new();
    let full = HPolyhedron::full(dim);
    for p in &pieces {
        for (signs, _) in cells_in(dim, &hs, p, &mut left)? {
            if seen.insert(signs.clone()) {
                let closure = cell_closure(dim, &hs, &signs, &full)?;
                let point = closure.relint_point().ok_or_else(|| Error::Numerical("arrangement cell lost its points".into()))?;
                cells.push(ArrCell { signs, closure, point });
            }
        }
    }
    cells.sort_by(|x, y| x.signs.cmp(&y.signs));
    let regular: Vec<_> = cells.iter().map(|c| regular_normal(&pieces, None, &c.point)).collect::<Result<_>>()?;
    let mut strata = Vec::new();
    for c in &cells {
        let adj: Vec<_> = (0..cells.len()).filter(|&j| cells[j].closure.contains(&c.point)).map(|j| regular[j].clone()).collect();
        let label: String = c.signs.iter().map(|s| match s {
            -1 => '-',
            0 => '0',
            _ => '+',
        }).collect();
        strata.push(Stratum::new(c.closure.clone(), ConeUnion::new(dim, adj).pruned(), label)?);
    }
    let dom = convex_domain(&pieces, n)?;
    Ok(StratifiedMapping::assemble(n, dim - n, strata, pieces, dom))
}

/// Projections of the pieces onto the first `n` coordinates.
pub(crate) fn projections<T: Scalar>(pieces: &[HPolyhedron<T>], n: usize) -> Result<Vec<(HPolyhedron<T>, VRep<T>)>> {
    let mut out = Vec::new();
    for p in pieces {
        let Some(v) = p.vrep() else { continue };
        let cut = |w: &Vec<T>| w[..n].to_vec();
        let pv = VRep {
            dim: n,
            vertices: v.vertices.iter().map(cut).collect(),
            rays: v.rays.iter().map(cut).collect(),
            lineality: v.lineality.iter().map(cut).collect(),
        };
        out.push((HPolyhedron::from_vrep(&pv)?, pv));
    }
    Ok(out)
}

/// The domain `∪ proj(pieces)` when it is convex, as its convex hull; `None` otherwise.
pub(crate) fn convex_domain<T: Scalar>(pieces: &[HPolyhedron<T>], n: usize) -> Result<Option<HPolyhedron<T>>> {
    let projs = projections(pieces, n)?;
    if projs.is_empty() {
        return Ok(None);
    }
    let mut all = VRep { dim: n, vertices: Vec::new(), rays: Vec::new(), lineality: Vec::new() };
    for (_, v) in &projs {
        all.vertices.extend(v.vertices.iter().cloned());
        all.rays.extend(v.rays.iter().cloned());
        all.lineality.extend(v.lineality.iter().cloned());
    }
    let hull = HPolyhedron::from_vrep(&all)?;
    let refs: Vec<&HPolyhedron<T>> = projs.iter().map(|(p, _)| p).collect();
    let hs = collect_hyperplanes(&refs);
    let mut budget = UNION_BUDGET;
    for (_, z) in cells_in(n, &hs, &hull, &mut budget)? {
        if !refs.iter().any(|p| p.contains(&z)) {
            return Ok(None);
        }
    }
    Ok(Some(hull))
}
