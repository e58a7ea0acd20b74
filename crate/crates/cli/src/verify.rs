//! The `verify-all` batch driver: runs the invariant suite on one graph and
//! prints a pass/fail table.

use std::collections::BTreeSet;
use std::sync::Arc;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pathspace::cylinder::{
    cluster_point, intersect, member, member_general, refine_to_basic, separating_basics,
    CylinderBasic, GeneralCylinder, Point,
};
use pathspace::desing::{check_collapsible_tail, collapse, desingularise, iso_check, IsoOutcome, SchedulePolicy};
use pathspace::diagonal::{
    diagram_check, q_decompose, q_nonzero_witness, q_projection, DiagonalElement, Scalar,
};
use pathspace::graph::{PresentedGraph, VertexRef};
use pathspace::path::{
    boundary_paths, common_extension, compose, e_leq_n, enumerate_paths_capped, BoundaryPath,
    ELeqN, Path,
};
use pathspace::path_maps::{phi_inf, phi_inf_inv};
use num_traits::Zero;

type Check = std::result::Result<(), String>;

struct Ctx {
    g: Arc<PresentedGraph>,
    depth: u64,
    rng: ChaCha8Rng,
    paths: Vec<Path>,
    points: Vec<Point>,
    reps: Vec<BoundaryPath>,
}

fn core_vertices(g: &PresentedGraph) -> Vec<VertexRef> {
    g.core_vertices()
        .map(|v| VertexRef::core(v.clone()))
        .collect()
}

impl Ctx {
    fn new(g: &PresentedGraph, depth: u64, seed: u64) -> Result<Self, String> {
        let g = Arc::new(g.clone());
        let mut paths = Vec::new();
        let mut reps = Vec::new();
        for v in core_vertices(&g) {
            paths.extend(enumerate_paths_capped(&g, &v, 3, 2).map_err(|e| e.to_string())?);
            reps.extend(
                boundary_paths(&g, &v, depth.min(5), 24)
                    .map_err(|e| e.to_string())?
                    .items,
            );
        }
        let points: Vec<Point> = paths
            .iter()
            .cloned()
            .map(Point::Finite)
            .chain(reps.iter().cloned().map(Point::from))
            .collect();
        Ok(Ctx {
            g,
            depth,
            rng: ChaCha8Rng::seed_from_u64(seed),
            paths,
            points,
            reps,
        })
    }

    fn pick<'a, T>(&mut self, pool: &'a [T]) -> Option<&'a T> {
        if pool.is_empty() {
            None
        } else {
            Some(&pool[self.rng.random_range(0..pool.len())])
        }
    }
}

fn check_structure(ctx: &mut Ctx) -> Check {
    let report = ctx.g.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(report.summary())
    }
}

fn check_incoming_prefixes(ctx: &mut Ctx) -> Check {
    for v in core_vertices(&ctx.g) {
        for k in 0..6 {
            let a = ctx.g.incoming_edges(&v, k).map_err(|e| e.to_string())?;
            let b = ctx.g.incoming_edges(&v, k + 1).map_err(|e| e.to_string())?;
            if !a.iter().zip(b.iter()).all(|(x, y)| x == y) {
                return Err(format!("incoming listings at {v} are not nested"));
            }
        }
    }
    Ok(())
}

fn check_composition(ctx: &mut Ctx) -> Check {
    let paths = ctx.paths.clone();
    for _ in 0..20 {
        let Some(p) = ctx.pick(&paths) else {
            return Ok(());
        };
        if p.len() < 2 {
            continue;
        }
        let cut = 1 + ctx.rng.random_range(0..p.len() - 1);
        let head = p.prefix(cut);
        let tail = Path::from_edges(&ctx.g, p.edges()[cut as usize..].to_vec())
            .map_err(|e| e.to_string())?;
        let joined = compose(&ctx.g, &head, &tail).map_err(|e| e.to_string())?;
        if joined != *p {
            return Err(format!("({head})({tail}) != {p}"));
        }
        let unit = Path::at(p.range().clone());
        if compose(&ctx.g, &unit, p).map_err(|e| e.to_string())? != *p {
            return Err(format!("unit law fails at {p}"));
        }
    }
    Ok(())
}

fn check_common_extension(ctx: &mut Ctx) -> Check {
    let paths = ctx.paths.clone();
    for _ in 0..40 {
        let (Some(mu), Some(nu)) = (ctx.pick(&paths), ctx.pick(&paths)) else {
            return Ok(());
        };
        if mu.range() != nu.range() {
            continue;
        }
        let joined = common_extension(mu, nu).map_err(|e| e.to_string())?;
        let z1 = CylinderBasic::whole(mu.clone());
        let z2 = CylinderBasic::whole(nu.clone());
        if joined.is_some() != intersect(&z1, &z2).is_some() {
            return Err(format!("extension/intersection disagree at {mu}, {nu}"));
        }
    }
    Ok(())
}

fn check_intersection_oracle(ctx: &mut Ctx) -> Check {
    let stems: Vec<Path> = ctx.paths.iter().filter(|p| p.len() <= 2).cloned().collect();
    let mut basics = Vec::new();
    for stem in &stems {
        let src = stem.source(&ctx.g).map_err(|e| e.to_string())?;
        basics.push(CylinderBasic::whole(stem.clone()));
        for e in ctx.g.incoming_edges(&src, 3).map_err(|e| e.to_string())? {
            basics.push(
                CylinderBasic::new(&ctx.g, stem.clone(), [e].into_iter().collect())
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    for _ in 0..60 {
        let (Some(z1), Some(z2)) = (ctx.pick(&basics), ctx.pick(&basics)) else {
            return Ok(());
        };
        let meet = intersect(z1, z2);
        for w in &ctx.points {
            let expected = member(w, z1) && member(w, z2);
            let got = meet.as_ref().map(|z| member(w, z)).unwrap_or(false);
            if expected != got {
                return Err(format!("{z1} ∩ {z2} wrong at {w}"));
            }
        }
    }
    Ok(())
}

fn check_refinement(ctx: &mut Ctx) -> Check {
    let stems: Vec<Path> = ctx.paths.iter().filter(|p| p.len() <= 2).cloned().collect();
    for _ in 0..30 {
        let Some(stem) = ctx.pick(&stems).cloned() else {
            return Ok(());
        };
        let src = stem.source(&ctx.g).map_err(|e| e.to_string())?;
        let mut ext = enumerate_paths_capped(&ctx.g, &src, 2, 2).map_err(|e| e.to_string())?;
        ext.retain(|p| !p.is_empty());
        let mut forbidden = BTreeSet::new();
        for _ in 0..ctx.rng.random_range(0..=2usize) {
            if let Some(p) = ctx.pick(&ext) {
                forbidden.insert(p.clone());
            }
        }
        let z = GeneralCylinder::new(&ctx.g, stem, forbidden).map_err(|e| e.to_string())?;
        let inside: Vec<Point> = ctx
            .points
            .iter()
            .filter(|w| member_general(w, &z))
            .cloned()
            .collect();
        let Some(lambda) = ctx.pick(&inside) else {
            continue;
        };
        let basic = refine_to_basic(&ctx.g, &z, lambda).map_err(|e| e.to_string())?;
        if !member(lambda, &basic) {
            return Err(format!("{lambda} missing from its refinement"));
        }
        for w in &ctx.points {
            if member(w, &basic) && !member_general(w, &z) {
                return Err(format!("{w} escapes {z} through {basic}"));
            }
        }
    }
    Ok(())
}

fn check_separation(ctx: &mut Ctx) -> Check {
    let reps = ctx.reps.clone();
    for _ in 0..30 {
        let (Some(a), Some(b)) = (ctx.pick(&reps), ctx.pick(&reps)) else {
            return Ok(());
        };
        if a.range() != b.range() {
            continue;
        }
        let x = Point::from(a.clone());
        let y = Point::from(b.clone());
        match separating_basics(&ctx.g, &x, &y).map_err(|e| e.to_string())? {
            None => {
                if x != y {
                    return Err(format!("{x} and {y} not separated"));
                }
            }
            Some((zx, zy)) => {
                if !member(&x, &zx) || member(&x, &zy) || !member(&y, &zy) || member(&y, &zx) {
                    return Err(format!("separation of {x} and {y} is wrong"));
                }
                if intersect(&zx, &zy).is_some() {
                    return Err(format!("separating basics of {x}, {y} overlap"));
                }
            }
        }
    }
    Ok(())
}

fn check_cluster(ctx: &mut Ctx) -> Check {
    let specs: Vec<_> = ctx
        .reps
        .iter()
        .filter_map(|r| match r {
            BoundaryPath::Infinite(s) => Some(s.clone()),
            BoundaryPath::Finite(_) => None,
        })
        .collect();
    for _ in 0..10 {
        let Some(spec) = ctx.pick(&specs) else {
            return Ok(());
        };
        let ws: Vec<Point> = (1..=8).map(|k| Point::Finite(spec.truncate(k))).collect();
        let out = cluster_point(&ctx.g, &ws, 3, None).map_err(|e| e.to_string())?;
        if out.omega != spec.truncate(3) {
            return Err(format!("cluster of {spec} misdetected as {}", out.omega));
        }
    }
    Ok(())
}

fn check_resolutions(ctx: &mut Ctx) -> Check {
    for v in core_vertices(&ctx.g) {
        for n in 0..=3u64.min(ctx.depth) {
            let ELeqN::Finite(paths) = e_leq_n(&ctx.g, &v, n).map_err(|e| e.to_string())? else {
                continue;
            };
            let mut sum = DiagonalElement::zero(ctx.g.clone());
            for p in &paths {
                sum = sum
                    .add(&DiagonalElement::projection(ctx.g.clone(), p.clone())
                        .map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
            }
            let p_v = DiagonalElement::projection(ctx.g.clone(), Path::at(v.clone()))
                .map_err(|e| e.to_string())?;
            let diff = p_v.sub(&sum).map_err(|e| e.to_string())?;
            if !diff.is_zero_element().map_err(|e| e.to_string())? {
                return Err(format!("resolution at {v}, n={n}, is not zero"));
            }
            for x in &ctx.reps {
                if x.range() == &v && !diff.eval(x).map_err(|e| e.to_string())?.is_zero() {
                    return Err(format!("resolution at {v}, n={n}, fails at {x}"));
                }
            }
        }
    }
    Ok(())
}

fn check_q_structure(ctx: &mut Ctx) -> Check {
    let pool = ctx.paths.clone();
    for _ in 0..4 {
        let mut fset: Vec<Path> = Vec::new();
        for _ in 0..ctx.rng.random_range(1..=5usize) {
            if let Some(p) = ctx.pick(&pool) {
                if !fset.contains(p) {
                    fset.push(p.clone());
                }
            }
        }
        fset.sort();
        if fset.is_empty() {
            continue;
        }
        for mu in &fset {
            let q = q_projection(&ctx.g, &fset, mu).map_err(|e| e.to_string())?;
            if !q
                .multiply(&q)
                .map_err(|e| e.to_string())?
                .equals(&q)
                .map_err(|e| e.to_string())?
            {
                return Err(format!("q at {mu} not idempotent"));
            }
            for nu in &fset {
                if nu != mu {
                    let q2 = q_projection(&ctx.g, &fset, nu).map_err(|e| e.to_string())?;
                    if !q
                        .multiply(&q2)
                        .map_err(|e| e.to_string())?
                        .is_zero_element()
                        .map_err(|e| e.to_string())?
                    {
                        return Err(format!("q at {mu} and {nu} not orthogonal"));
                    }
                }
            }
        }
        for nu in &fset {
            let mut sum = DiagonalElement::zero(ctx.g.clone());
            for ext in &fset {
                if nu.is_prefix_of(ext) {
                    sum = sum
                        .add(&q_projection(&ctx.g, &fset, ext).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                }
            }
            let p_nu = DiagonalElement::projection(ctx.g.clone(), nu.clone())
                .map_err(|e| e.to_string())?;
            if !sum.equals(&p_nu).map_err(|e| e.to_string())? {
                return Err(format!("reconstruction fails at {nu}"));
            }
        }
    }
    Ok(())
}

fn check_norm(ctx: &mut Ctx) -> Check {
    let pool = ctx.paths.clone();
    for _ in 0..4 {
        let mut terms = Vec::new();
        for _ in 0..ctx.rng.random_range(1..=4usize) {
            if let Some(p) = ctx.pick(&pool) {
                let c = Scalar::from_integer(ctx.rng.random_range(-3i64..=3));
                terms.push((p.clone(), c));
            }
        }
        let a = DiagonalElement::from_terms(ctx.g.clone(), terms).map_err(|e| e.to_string())?;
        let norm_sq = a.norm_squared().map_err(|e| e.to_string())?;
        let mut sup = num_rational::BigRational::zero();
        let mut reps = ctx.reps.clone();
        for (stem, _) in q_decompose(&a).map_err(|e| e.to_string())? {
            if let Some(w) =
                q_nonzero_witness(&ctx.g, &a.support(), &stem).map_err(|e| e.to_string())?
            {
                reps.push(w);
            }
        }
        for x in &reps {
            let v = a.eval(x).map_err(|e| e.to_string())?.modulus_squared();
            if v > norm_sq {
                return Err(format!("character at {x} exceeds the norm of {a}"));
            }
            if v > sup {
                sup = v;
            }
        }
        if sup != norm_sq {
            return Err(format!("norm² of {a} is {norm_sq}, best character only {sup}"));
        }
    }
    Ok(())
}

fn check_desingularisation(ctx: &mut Ctx) -> Check {
    if ctx.g.tails().next().is_some() {
        // Only meaningful for tail-free presentations.
        return Ok(());
    }
    let desing = desingularise(&ctx.g, &SchedulePolicy::default()).map_err(|e| e.to_string())?;
    if !desing.graph.is_row_finite() || !desing.graph.singular_vertices().is_empty() {
        return Err("desingularisation left singular structure".into());
    }
    for tail in &desing.added_tails {
        let report = check_collapsible_tail(&desing.graph, tail).map_err(|e| e.to_string())?;
        if !report.all_pass() {
            return Err(format!("appended tail {tail} is not collapsible"));
        }
    }
    let back = collapse(&desing.graph, &desing.added_tails).map_err(|e| e.to_string())?;
    match iso_check(&back.collapsed, &ctx.g, 8) {
        IsoOutcome::Isomorphic(_) => {}
        other => return Err(format!("round trip says {other:?}")),
    }

    // Boundary correspondence and the intertwining identity on samples.
    let m = back.map;
    let f_arc = Arc::new(m.original().clone());
    let e_arc = Arc::new(m.collapsed().clone());
    let mut e_reps = Vec::new();
    for v in core_vertices(e_arc.as_ref()) {
        e_reps.extend(
            boundary_paths(e_arc.as_ref(), &v, 4, 12)
                .map_err(|e| e.to_string())?
                .items,
        );
    }
    let mut f_specs = Vec::new();
    for x in &e_reps {
        let lam = phi_inf_inv(&m, x).map_err(|e| e.to_string())?;
        let back = phi_inf(&m, &lam).map_err(|e| e.to_string())?;
        if back != *x {
            return Err(format!("boundary correspondence fails at {x}"));
        }
        f_specs.push(lam);
    }
    let mut mus = Vec::new();
    for v in core_vertices(e_arc.as_ref()) {
        mus.extend(enumerate_paths_capped(e_arc.as_ref(), &v, 3, 2).map_err(|e| e.to_string())?);
    }
    for x in f_specs.iter().take(8) {
        for mu in mus.iter().take(24) {
            if !diagram_check(&m, &f_arc, &e_arc, x, mu).map_err(|e| e.to_string())? {
                return Err(format!("diagram fails at x={x}, mu={mu}"));
            }
        }
    }
    Ok(())
}

pub fn verify_all(g: &PresentedGraph, depth: u64, seed: u64) -> Result<bool> {
    let mut ctx = match Ctx::new(g, depth, seed) {
        Ok(ctx) => ctx,
        Err(e) => {
            println!("FAIL  context: {e}");
            return Ok(false);
        }
    };
    let checks: Vec<(&str, fn(&mut Ctx) -> Check)> = vec![
        ("structural validity", check_structure),
        ("incoming listings nested", check_incoming_prefixes),
        ("composition laws", check_composition),
        ("common extension vs intersection", check_common_extension),
        ("intersection pointwise oracle", check_intersection_oracle),
        ("refinement soundness", check_refinement),
        ("separation of points", check_separation),
        ("cluster extraction", check_cluster),
        ("vertex resolutions", check_resolutions),
        ("q-projection structure", check_q_structure),
        ("norm vs characters", check_norm),
        ("desingularisation round trip", check_desingularisation),
    ];
    let mut all_ok = true;
    for (name, check) in checks {
        match check(&mut ctx) {
            Ok(()) => println!("ok    {name}"),
            Err(detail) => {
                println!("FAIL  {name}: {detail}");
                all_ok = false;
            }
        }
    }
    println!("{}", if all_ok { "all checks passed" } else { "FAILURES present" });
    Ok(all_ok)
}
