//! Property checks on explicit instances. Each returns `Err` with a description of the first
//! violation; the randomised drivers live in [`super`] (seeded) and in the proptest suite.

use rand::Rng;

use crate::coderivative::{check_criterion, coderivative, kernel_of, outer_norm, projectional_coderivative, PhMap};
use crate::functions::{
    level_set_analysis, outer_limiting_subdifferential, relative_lip_modulus, subdifferentials, sublinear_analysis, PlFunction,
};
use crate::geometry::{distance_to_union, normal_cone_convex, tangent_cone, ConeUnion, HPolyhedron, PolyCone, FACE_BUDGET};
use crate::linalg::{add, dot, norm, scale, sub, Mat};
use crate::oracle::{estimate_function_modulus, FnBox, SampleConfig};
use crate::stratified::{build_lcp, regular_normal, stratify_union, StratifiedMapping, Stratum, UNION_BUDGET};

pub type Check = std::result::Result<(), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `v = proj_K v + proj_{K°} v` with orthogonal parts, each projection computed on its own.
pub fn moreau(k: &PolyCone<f64>, v: &[f64]) -> Check {
    let p = k.project(v).map_err(err)?.point;
    let polar = k.polar();
    let q = polar.project(v).map_err(err)?.point;
    let scale_v = 1.0 + norm(v);
    let gap = norm(&sub(&add(&p, &q), v));
    if gap > 1e-7 * scale_v {
        return Err(format!("proj_K v + proj_K° v misses v by {gap}"));
    }
    let ip = dot(&p, &q).abs();
    if ip > 1e-7 * scale_v * scale_v {
        return Err(format!("parts are not orthogonal: ⟨p, q⟩ = {ip}"));
    }
    if !k.contains(&p) || !polar.contains(&q) {
        return Err("a projection left its cone".into());
    }
    Ok(())
}

pub fn polar_involution(k: &PolyCone<f64>) -> Check {
    let back = k.polar().polar();
    if !back.same_as(k) {
        return Err(format!("K°° differs from K: {:?} vs {:?}", back.generators(), k.generators()));
    }
    Ok(())
}

/// `T_P(x)° = N_P(x)` and `N_P(x)° = T_P(x)`.
pub fn tangent_normal_polarity(p: &HPolyhedron<f64>, x: &[f64]) -> Check {
    let t = tangent_cone(p, x).map_err(err)?;
    let n = normal_cone_convex(p, x).map_err(err)?;
    if !t.polar().same_as(&n) {
        return Err("polar of the tangent cone is not the normal cone".into());
    }
    if !n.polar().same_as(&t) {
        return Err("polar of the normal cone is not the tangent cone".into());
    }
    Ok(())
}

pub(crate) fn same_graph(a: &PhMap<f64>, b: &PhMap<f64>) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    ga.pieces.iter().all(|k| gb.pieces.iter().any(|l| k.is_subset_of(l))) && gb.pieces.iter().all(|k| ga.pieces.iter().any(|l| k.is_subset_of(l)))
}

/// For `x̄ ∈ int X` the projectional coderivative has the graph of the coderivative.
pub fn interior_reduction(s: &StratifiedMapping<f64>, x_set: &HPolyhedron<f64>, x: &[f64], u: &[f64]) -> Check {
    if !x_set.c().is_empty() || x_set.slacks(x).iter().any(|s| *s <= 1e-6) {
        return Err("x̄ is not an interior point of X".into());
    }
    let p = projectional_coderivative(s, x_set, x, u).map_err(err)?;
    let d = coderivative(s, x, u).map_err(err)?;
    if !same_graph(&p, &d) {
        return Err("projectional coderivative differs from the coderivative at an interior point".into());
    }
    Ok(())
}

/// Trivial kernel, finite outer norm and the criterion verdict agree.
pub fn criterion_equivalence(s: &StratifiedMapping<f64>, x_set: &HPolyhedron<f64>, x: &[f64], u: &[f64]) -> Check {
    let h = projectional_coderivative(s, x_set, x, u).map_err(err)?;
    let kernel_trivial = kernel_of(&h).is_none();
    let finite = outer_norm(&h).map_err(err)?.value.is_finite();
    let holds = check_criterion(s, x_set, x, u).map_err(err)?.holds;
    if kernel_trivial != finite || finite != holds {
        return Err(format!("kernel trivial {kernel_trivial}, outer norm finite {finite}, criterion {holds}"));
    }
    Ok(())
}

/// Normals to `epi f` above the graph are horizontal and are normals at the graph point.
///
/// The inclusion is checked between the computed normal cones, and each generator is checked
/// directly: moving from `(x, f(x))` along it by a small `t` must keep distance `t` from the
/// epigraph.
pub fn epigraph_proximal_slice(f: &PlFunction<f64>, x: &[f64], lift: f64) -> Check {
    let fx = f.value(x);
    if !fx.is_finite() || lift <= 0.0 {
        return Err("need x ∈ dom f and a positive lift".into());
    }
    let pieces = f.epigraph_pieces().map_err(err)?;
    let n = f.n;
    let low: Vec<f64> = x.iter().copied().chain([fx]).collect();
    let high: Vec<f64> = x.iter().copied().chain([fx + lift]).collect();
    let k_high = regular_normal(&pieces, None, &high).map_err(err)?;
    let k_low = regular_normal(&pieces, None, &low).map_err(err)?;
    if !k_high.is_subset_of(&k_low) {
        return Err("normal cone above the graph is not inside the normal cone at the graph".into());
    }
    let g = k_high.generators();
    let dirs = g.rays.iter().cloned().chain(g.lineality.iter().flat_map(|l| [l.clone(), scale(-1.0, l)]));
    let t = 1e-4;
    for w in dirs {
        let w = scale(1.0 / norm(&w), &w);
        if w[n].abs() > 1e-9 {
            return Err(format!("normal {w:?} above the graph has a vertical component"));
        }
        let d = distance_to_union(&add(&low, &scale(t, &w)), &pieces).map_err(err)?;
        if d < t * (1.0 - 1e-6) {
            return Err(format!("{w:?} is not a proximal normal at the graph point: distance {d} < {t}"));
        }
    }
    Ok(())
}

/// The modulus from projectional subgradients equals the profile-mapping modulus, and a
/// sampled difference quotient never exceeds it.
pub fn modulus_equality(f: &PlFunction<f64>, x_set: &HPolyhedron<f64>, x: &[f64]) -> Check {
    let r = relative_lip_modulus(f, x_set, x).map_err(err)?;
    let (a, b) = (r.modulus, r.profile_modulus);
    let same = (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= 1e-7 * a.abs().max(1.0);
    if !same {
        return Err(format!("function route {a} vs profile route {b}"));
    }
    if a.is_finite() {
        let h = FnBox::new(f.n, |y: &[f64]| f.value(y));
        let cfg = SampleConfig { seed: 1, radii: vec![1e-3], pairs_per_radius: 64, set_discretization: 4, refine_steps: 32 };
        let est = estimate_function_modulus(&h, x_set, x, &cfg, None).map_err(err)?.estimate();
        if est > a * (1.0 + 1e-6) + 1e-9 {
            return Err(format!("sampled quotient {est} exceeds the modulus {a}"));
        }
    }
    Ok(())
}

/// Every subgradient taken along points strictly above the affine minorant with slope `v̄`
/// is a limiting subgradient.
pub fn outer_inside_basic(f: &PlFunction<f64>, x: &[f64], v: &[f64]) -> Check {
    let outer = outer_limiting_subdifferential(f, x, v).map_err(err)?;
    let (basic, _) = subdifferentials(f, x).map_err(err)?;
    let in_basic = |p: &[f64]| basic.iter().any(|b| b.contains(p));
    for piece in &outer {
        let Some(g) = piece.vrep() else { continue };
        let mut probes: Vec<Vec<f64>> = g.vertices.clone();
        if let Some(c) = g.relint_point() {
            probes.push(c);
        }
        for w in &g.vertices {
            for r in g.rays.iter().chain(&g.lineality) {
                probes.push(add(w, r));
            }
            for l in &g.lineality {
                probes.push(sub(w, l));
            }
        }
        if let Some(p) = probes.iter().find(|p| !in_basic(p)) {
            return Err(format!("{p:?} is in the outer limiting subdifferential but not in ∂f"));
        }
    }
    Ok(())
}

/// `‖proj_T x*‖ = max{max_{w ∈ T ∩ 𝕊} ⟨x*, w⟩, 0}`: sampled unit tangents never beat the
/// projection, and the normalised projection attains it.
pub fn projection_norm_identity<R: Rng>(t: &PolyCone<f64>, xstar: &[f64], rng: &mut R) -> Check {
    let p = t.project(xstar).map_err(err)?.point;
    let np = norm(&p);
    let slack = 1e-9 * (1.0 + norm(xstar));
    let g = t.generators();
    for _ in 0..32 {
        let mut w = vec![0.0; xstar.len()];
        for r in &g.rays {
            w = add(&w, &scale(rng.gen::<f64>(), r));
        }
        for l in &g.lineality {
            w = add(&w, &scale(rng.gen_range(-1.0..1.0), l));
        }
        let nw = norm(&w);
        if nw < 1e-12 {
            continue;
        }
        let ip = dot(xstar, &w) / nw;
        if ip > np + slack {
            return Err(format!("tangent {w:?} gives ⟨x*, w⟩ = {ip} > ‖proj‖ = {np}"));
        }
    }
    if np > slack {
        let w = scale(1.0 / np, &p);
        if !t.contains(&w) || (dot(xstar, &w) - np).abs() > slack {
            return Err(format!("proj/‖proj‖ does not attain ‖proj‖ = {np}"));
        }
    }
    Ok(())
}

/// Points of `P` (vertices, midpoints, random combinations of generators) lie in the relative
/// interior of exactly one face.
pub fn faces_partition<R: Rng>(p: &HPolyhedron<f64>, rng: &mut R) -> Check {
    let faces = p.faces(FACE_BUDGET).map_err(err)?;
    let Some(v) = p.vrep() else { return Ok(()) };
    let mut points: Vec<Vec<f64>> = v.vertices.clone();
    for f in &faces {
        points.push(f.relint_point().to_vec());
    }
    for _ in 0..16 {
        let a = &v.vertices[rng.gen_range(0..v.vertices.len())];
        let b = &v.vertices[rng.gen_range(0..v.vertices.len())];
        let lambda: f64 = if rng.gen_bool(0.5) { 0.5 } else { rng.gen() };
        let mut x = add(&scale(lambda, a), &scale(1.0 - lambda, b));
        for r in &v.rays {
            if rng.gen_bool(0.5) {
                x = add(&x, &scale(f64::from(rng.gen_range(0..3)), r));
            }
        }
        for l in &v.lineality {
            x = add(&x, &scale(f64::from(rng.gen_range(-2..=2)), l));
        }
        points.push(x);
    }
    for x in &points {
        let k = faces.iter().filter(|f| f.relint_contains(x)).count();
        if k != 1 {
            return Err(format!("{x:?} is in the relative interior of {k} faces"));
        }
    }
    Ok(())
}

fn nearest_on(pieces: &[HPolyhedron<f64>], y: &[f64]) -> std::result::Result<Vec<f64>, String> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for p in pieces.iter().filter(|p| !p.is_empty()) {
        let q = p.project(y).map_err(err)?;
        if best.as_ref().is_none_or(|(d, _)| q.distance < *d) {
            best = Some((q.distance, q.point));
        }
    }
    best.map(|b| b.1).ok_or_else(|| "empty graph".into())
}

/// A point in the relative interior of a stratum: its reference point moved towards a random
/// point of the closure.
fn point_in_stratum<R: Rng>(st: &Stratum<f64>, rng: &mut R) -> Vec<f64> {
    let c = st.point().to_vec();
    let Some(v) = st.cell.vrep() else { return c };
    let mut q = v.vertices[rng.gen_range(0..v.vertices.len())].clone();
    for r in &v.rays {
        q = add(&q, &scale(rng.gen::<f64>(), r));
    }
    let lambda = rng.gen_range(0.1..0.9);
    add(&scale(lambda, &c), &scale(1.0 - lambda, &q))
}

/// Proximal normals obtained by projecting perturbed points back onto the graph lie in the
/// normal cone declared for the stratum the projection lands in. Three points per stratum.
pub fn stratum_constancy<R: Rng>(s: &StratifiedMapping<f64>, rng: &mut R) -> Check {
    for st in &s.strata {
        for _ in 0..3 {
            let z = point_in_stratum(st, rng);
            let d: Vec<f64> = (0..z.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y = add(&z, &scale(1e-4 / norm(&d).max(1e-12), &d));
            let p = nearest_on(s.pieces(), &y)?;
            let gap = sub(&y, &p);
            let ng = norm(&gap);
            if ng < 1e-9 {
                continue;
            }
            let v = scale(1.0 / ng, &gap);
            let Some(i) = s.stratum_of(&p) else { continue };
            // the measured direction carries the projection error divided by the 1e-4 offset
            let mut dist = f64::INFINITY;
            for k in &s.strata[i].normals.pieces {
                dist = dist.min(norm(&k.project(&v).map_err(err)?.dual));
            }
            if dist > 1e-6 {
                return Err(format!("proximal normal {v:?} at a point of {} is outside its declared cone", s.strata[i].label));
            }
        }
    }
    Ok(())
}

/// Regular normals along sequences approaching a graph point from every adjacent stratum lie
/// in the limiting normal cone there. Along the way the regular cone sits inside the limiting
/// cone, with equality where the latter is convex.
pub fn outer_semicontinuity<R: Rng>(s: &StratifiedMapping<f64>, z: &[f64], rng: &mut R) -> Check {
    let (x, u) = z.split_at(s.n);
    let limit = s.limiting_normal_cone(x, u).map_err(err)?;
    for i in s.adjacent_strata(z) {
        let q = point_in_stratum(&s.strata[i], rng);
        for t in [1e-1, 1e-2, 1e-3] {
            let zk = add(z, &scale(t, &sub(&q, z)));
            let (xk, uk) = zk.split_at(s.n);
            let regular = regular_normal(s.pieces(), None, &zk).map_err(err)?;
            let g = regular.generators();
            for w in g.rays.iter().chain(&g.lineality).cloned().chain(g.lineality.iter().map(|l| scale(-1.0, l))) {
                if !limit.contains(&w) {
                    return Err(format!("regular normal {w:?} near the point escapes the limiting cone"));
                }
            }
            let here = s.limiting_normal_cone(xk, uk).map_err(err)?;
            if !here.pieces.iter().any(|k| regular.is_subset_of(k)) {
                return Err(format!("regular normals inside stratum {} are not limiting normals", s.strata[i].label));
            }
            // where the graph is locally convex the two cones coincide
            if here.pieces.len() == 1 && !here.pieces[0].is_subset_of(&regular) {
                return Err(format!("regular and limiting cones differ inside stratum {}", s.strata[i].label));
            }
        }
    }
    Ok(())
}

fn same_union(a: &ConeUnion<f64>, b: &ConeUnion<f64>) -> bool {
    a.pieces.iter().all(|k| b.pieces.iter().any(|l| k.is_subset_of(l))) && b.pieces.iter().all(|k| a.pieces.iter().any(|l| k.is_subset_of(l)))
}

/// The LCP builder and the generic union builder give the same normal cones at graph points:
/// stratum points, the origin and random points of the graph pieces.
pub fn builder_agreement<R: Rng>(m: &[Vec<f64>], points: usize, rng: &mut R) -> Check {
    let lcp = build_lcp(m).map_err(err)?;
    let uni = stratify_union(lcp.n, lcp.pieces(), UNION_BUDGET).map_err(err)?;
    let mut zs: Vec<Vec<f64>> = vec![vec![0.0; lcp.n + lcp.m]];
    while zs.len() < points {
        let st = &lcp.strata[rng.gen_range(0..lcp.strata.len())];
        zs.push(if rng.gen_bool(0.3) { st.point().to_vec() } else { point_in_stratum(st, rng) });
    }
    for z in &zs {
        let (x, u) = z.split_at(lcp.n);
        let a = lcp.limiting_normal_cone(x, u).map_err(err)?;
        let b = uni.limiting_normal_cone(x, u).map_err(err)?;
        if !same_union(&a, &b) {
            return Err(format!("builders disagree at {z:?}"));
        }
    }
    Ok(())
}

/// `dom S = K + rg A`: points `k - A x` are in the domain, and domain membership of sampled
/// points agrees with feasibility of `{x : A x + p ∈ K}` decided on its own.
pub fn domain_formula<R: Rng>(a: &[Vec<f64>], k: &HPolyhedron<f64>, dom: &HPolyhedron<f64>, rng: &mut R) -> Check {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let am = Mat::from_rows(a, n);
    let Some(kv) = k.vrep() else { return Ok(()) };
    for _ in 0..16 {
        let mut kp = kv.vertices[rng.gen_range(0..kv.vertices.len())].clone();
        for r in &kv.rays {
            kp = add(&kp, &scale(rng.gen::<f64>() * 3.0, r));
        }
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let p = sub(&kp, &am.mul_vec(&x));
        if !dom.contains(&p) {
            return Err(format!("{p:?} = k - A x is not in the computed domain"));
        }
    }
    for _ in 0..16 {
        let p: Vec<f64> = (0..m).map(|_| f64::from(rng.gen_range(-4..=4)) * 0.5).collect();
        // {x : K.A (A x + p) ≤ K.b, K.C (A x + p) = K.d}
        let rows = |rs: &[Vec<f64>], rhs: &[f64]| -> (Vec<Vec<f64>>, Vec<f64>) {
            rs.iter().zip(rhs).map(|(r, b)| (am.tmul_vec(r), b - dot(r, &p))).unzip()
        };
        let (ia, ib) = rows(k.a(), k.b());
        let (ea, eb) = rows(k.c(), k.d());
        let fiber = HPolyhedron::new(n, ia, ib, ea, eb).map_err(err)?;
        if fiber.is_empty() == dom.contains(&p) {
            let near_boundary = dom.slacks(&p).iter().any(|s| s.abs() < 1e-7);
            if !near_boundary {
                return Err(format!("domain membership of {p:?} disagrees with feasibility of the fibre"));
            }
        }
    }
    Ok(())
}

/// Positive homogeneity of the graph, on sampled graph points and `λ ∈ {0.5, 2}`.
pub fn positive_homogeneity<R: Rng>(h: &PhMap<f64>, rng: &mut R) -> Check {
    for piece in &h.pieces {
        let g = piece.param.generators();
        for _ in 0..4 {
            let mut y = vec![0.0; piece.param.dim()];
            for r in &g.rays {
                y = add(&y, &scale(rng.gen::<f64>(), r));
            }
            for l in &g.lineality {
                y = add(&y, &scale(rng.gen_range(-1.0..1.0), l));
            }
            let (u, x) = (piece.input(&y), piece.output(&y));
            for lambda in [0.5, 2.0] {
                if !h.graph_contains(&scale(lambda, &u), &scale(lambda, &x)) {
                    return Err(format!("λ = {lambda} moves ({u:?}, {x:?}) off the graph"));
                }
            }
        }
    }
    Ok(())
}

/// Dropping pieces never increases the outer norm, and adding the identity's graph makes it
/// at least one.
pub fn outer_norm_monotone(h: &PhMap<f64>) -> Check {
    let full = outer_norm(h).map_err(err)?.value;
    for k in 0..h.pieces.len() {
        let part = PhMap { m: h.m, n: h.n, pieces: h.pieces[..k].to_vec() };
        let v = outer_norm(&part).map_err(err)?.value;
        if v > full * (1.0 + 1e-9) + 1e-12 {
            return Err(format!("{k} pieces give {v} > {full} for all of them"));
        }
    }
    if h.m == h.n {
        let mut more = h.clone();
        more.pieces.extend(PhMap::<f64>::identity(h.n).pieces);
        let v = outer_norm(&more).map_err(err)?.value;
        if v < full.max(1.0) * (1.0 - 1e-9) {
            return Err(format!("adding the identity lowered the norm to {v} from {full}"));
        }
    }
    Ok(())
}

/// The relative modulus of a level-set mapping never exceeds the classical one.
pub fn level_set_moduli_ordered(f: &PlFunction<f64>, x: &[f64], v: &[f64]) -> Check {
    let r = level_set_analysis(f, x, v).map_err(err)?;
    if r.lip_x > r.classical_lip * (1.0 + 1e-9) {
        return Err(format!("relative modulus {} exceeds the classical {}", r.lip_x, r.classical_lip));
    }
    Ok(())
}

/// Finite profile-mapping modulus exactly when the projectional horizon subdifferential is
/// trivial.
pub fn finite_iff_horizon_trivial(f: &PlFunction<f64>, x_set: &HPolyhedron<f64>, x: &[f64]) -> Check {
    let r = relative_lip_modulus(f, x_set, x).map_err(err)?;
    if r.profile_modulus.is_finite() != r.horizon_trivial {
        return Err(format!("profile modulus {} but horizon trivial = {}", r.profile_modulus, r.horizon_trivial));
    }
    Ok(())
}

/// Every bounded exposed face of `D` lies in one piece of `∂_{dom σ_D} σ_D(0)`.
pub fn bounded_faces_are_subgradients(d: &HPolyhedron<f64>) -> Check {
    let r = sublinear_analysis(d).map_err(err)?;
    for face in &r.bounded_faces {
        let Some(v) = face.vrep() else { continue };
        if !r.subgradients.iter().any(|s| v.vertices.iter().all(|w| s.contains(w))) {
            return Err(format!("bounded face with vertices {:?} is not among the subgradients", v.vertices));
        }
    }
    Ok(())
}
