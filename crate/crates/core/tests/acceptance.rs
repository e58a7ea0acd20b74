//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the table.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pathspace::cylinder::{intersect, member, member_general, refine_to_basic, GeneralCylinder, Point};
use pathspace::desing::{
    check_collapsible, check_collapsible_tail, collapse, desingularise, iso_check, IsoOutcome,
    SchedulePolicy,
};
use pathspace::diagonal::{
    character_to_path, diagram_check, q_decompose, q_is_nonzero, q_nonzero_witness, q_projection,
    reduction_matches_compression, DiagonalElement, PrefixFamily,
};
use pathspace::graph::PresentedGraph;
use pathspace::path::{enumerate_paths_capped, BoundaryPath, Path};
use pathspace::path_maps::{
    open_image_witness, open_preimage_witness, phi_inf, phi_inf_inv, CollapseMap,
};
use pathspace::random::{random_presentation, random_row_finite};
use pathspace::{fixtures, textio};

type CheckResult = Result<(), String>;

fn criterion(number: u32, name: &str, body: impl FnOnce() -> CheckResult) {
    match body() {
        Ok(()) => println!("[PASS] criterion {number}: {name}"),
        Err(msg) => {
            println!("[FAIL] criterion {number}: {name}: {msg}");
            panic!("criterion {number} failed: {msg}");
        }
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> CheckResult {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Criterion 1: the worked example round trip. The declared tail of the
/// two-tailed figure passes C1–C5, collapsing it recovers the four-vertex
/// graph exactly, and the two non-collapsible paths are rejected with the
/// right conditions as witnesses.
#[test]
fn c1_worked_example_round_trip() {
    criterion(1, "worked example round trip", || {
        let f_ex = fixtures::f_ex();
        let report = check_collapsible_tail(&f_ex, "nu").map_err(err)?;
        ensure(report.all_pass(), format!("nu should be collapsible:\n{report}"))?;

        let out = collapse(&f_ex, &["nu".to_string()].into_iter().collect()).map_err(err)?;
        match iso_check(&out.collapsed, &fixtures::e_ex(), 8) {
            IsoOutcome::Isomorphic(_) => {}
            other => return Err(format!("collapse(f_ex) vs e_ex: {other:?}")),
        }

        let cyc = textio::parse_spec(&f_ex, "v~(nu1.g.f)").map_err(err)?;
        let report = check_collapsible(&f_ex, &cyc).map_err(err)?;
        ensure(!report.c4.passes, "the cycle must fail C4")?;
        ensure(
            report.c4.witness.is_some(),
            "C4 failure must carry a witness",
        )?;

        let once_entered = textio::parse_spec(&f_ex, "nu1.nu2@nu").map_err(err)?;
        let report = check_collapsible(&f_ex, &once_entered).map_err(err)?;
        ensure(report.c4.passes, "nu1.nu2@nu does not repeat edges")?;
        ensure(!report.c5.passes, "nu1.nu2@nu must fail C5")?;
        ensure(
            report
                .c5
                .witness
                .as_deref()
                .unwrap_or("")
                .contains("1 entry"),
            "C5 witness must name the single entry",
        )
    });
}

/// Criterion 2: desingularise/collapse round trip on at least 200 random
/// presentations with at most 6 core vertices and 2 families.
#[test]
fn c2_desingularise_collapse_round_trip() {
    criterion(2, "desingularise/collapse round trip x200", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        let mut checked = 0;
        while checked < 200 {
            let g = random_presentation(&mut rng, 6, 2);
            let desing = desingularise(&g, &SchedulePolicy::default()).map_err(err)?;
            ensure(
                desing.graph.is_row_finite() && desing.graph.singular_vertices().is_empty(),
                "desingularisation must be row-finite without singular vertices",
            )?;
            for tail in &desing.added_tails {
                let report = check_collapsible_tail(&desing.graph, tail).map_err(err)?;
                ensure(report.all_pass(), format!("appended tail {tail}: {report}"))?;
            }
            let back = collapse(&desing.graph, &desing.added_tails).map_err(err)?;
            match iso_check(&back.collapsed, &g, 8) {
                IsoOutcome::Isomorphic(_) => {}
                other => {
                    return Err(format!(
                        "round trip failed ({other:?}) on:\n{}",
                        textio::print_graph(&g)
                    ))
                }
            }
            checked += 1;
        }
        Ok(())
    });
}

/// Criterion 3: on random row-finite graphs, `intersect` and `member`
/// agree with brute-force set operations over all basic pairs with stems of
/// length at most 3 and all paths enumerable to depth 6.
#[test]
fn c3_topology_oracle_equivalence() {
    criterion(3, "intersection agrees with pointwise sets", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        for _ in 0..25 {
            let g = random_row_finite(&mut rng, 5, 6);
            let stems = common::all_paths(&g, 3, 4).map_err(err)?;
            let basics = common::basics_over(&g, &stems, 2).map_err(err)?;
            let points = common::finite_points(&g, 6, 6).map_err(err)?;

            // Membership sets packed as bitmaps over the point list.
            let words = points.len().div_ceil(64);
            let bitmap = |z: &pathspace::cylinder::CylinderBasic| -> Vec<u64> {
                let mut bits = vec![0u64; words];
                for (k, w) in points.iter().enumerate() {
                    if member(w, z) {
                        bits[k / 64] |= 1 << (k % 64);
                    }
                }
                bits
            };
            let maps: Vec<Vec<u64>> = basics.iter().map(&bitmap).collect();
            let empty = vec![0u64; words];
            let mut meet_maps: std::collections::BTreeMap<
                pathspace::cylinder::CylinderBasic,
                Vec<u64>,
            > = Default::default();

            for (i, z1) in basics.iter().enumerate() {
                for (j, z2) in basics.iter().enumerate().skip(i) {
                    let got: &Vec<u64> = match intersect(z1, z2) {
                        None => &empty,
                        Some(meet) => meet_maps.entry(meet.clone()).or_insert_with(|| bitmap(&meet)),
                    };
                    let agrees = got
                        .iter()
                        .zip(maps[i].iter().zip(maps[j].iter()))
                        .all(|(m, (a, b))| *m == a & b);
                    if !agrees {
                        for (k, w) in points.iter().enumerate() {
                            let expected =
                                maps[i][k / 64] & maps[j][k / 64] & (1 << (k % 64)) != 0;
                            let found = got[k / 64] & (1 << (k % 64)) != 0;
                            if expected != found {
                                return Err(format!("{z1} ∩ {z2} disagrees at {w}"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    });
}

/// Criterion 4: refinement soundness on at least 500 random
/// (path-complement set, point) instances under the depth-6 oracle.
#[test]
fn c4_basis_refinement_soundness() {
    criterion(4, "basis refinement soundness x500", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        let mut checked = 0usize;
        while checked < 500 {
            let g = random_presentation(&mut rng, 5, 1);
            let stems = common::all_paths(&g, 2, 2).map_err(err)?;
            if stems.is_empty() {
                continue;
            }
            use rand::Rng;
            let stem = stems[rng.random_range(0..stems.len())].clone();
            let src = stem.source(&g).map_err(err)?;
            let mut extensions = enumerate_paths_capped(&g, &src, 2, 2).map_err(err)?;
            extensions.retain(|p| !p.is_empty());
            let mut forbidden = BTreeSet::new();
            for _ in 0..rng.random_range(0..=3usize) {
                if !extensions.is_empty() {
                    forbidden.insert(extensions[rng.random_range(0..extensions.len())].clone());
                }
            }
            let z = GeneralCylinder::new(&g, stem, forbidden).map_err(err)?;

            let mut points: Vec<Point> = common::finite_points(&g, 6, 3).map_err(err)?;
            points.extend(
                common::boundary_reps(&g, 4, 24)
                    .map_err(err)?
                    .into_iter()
                    .map(Point::from),
            );
            let inside: Vec<&Point> = points.iter().filter(|w| member_general(w, &z)).collect();
            if inside.is_empty() {
                continue;
            }
            let lambda = inside[rng.random_range(0..inside.len())];
            let basic = refine_to_basic(&g, &z, lambda).map_err(err)?;
            ensure(
                member(lambda, &basic),
                format!("{lambda} lost from its refinement {basic}"),
            )?;
            for w in &points {
                if member(w, &basic) && !member_general(w, &z) {
                    return Err(format!("{w} in {basic} escapes {z}"));
                }
            }
            checked += 1;
        }
        Ok(())
    });
}

fn desing_map(g: &PresentedGraph) -> Result<CollapseMap, String> {
    let desing = desingularise(g, &SchedulePolicy::default()).map_err(err)?;
    Ok(collapse(&desing.graph, &desing.added_tails).map_err(err)?.map)
}

/// Infinite-path representatives of the original graph whose range
/// survives, with prefixes up to `depth`.
fn surviving_infinite_reps(
    m: &CollapseMap,
    depth: u64,
    limit: usize,
) -> Result<Vec<pathspace::InfPathSpec>, String> {
    let mut out = Vec::new();
    for rep in common::boundary_reps(m.original(), depth, limit).map_err(err)? {
        match rep {
            BoundaryPath::Infinite(spec) if m.survives(spec.range()) => out.push(spec),
            BoundaryPath::Infinite(_) => {}
            BoundaryPath::Finite(p) => {
                return Err(format!(
                    "row-finite sourceless graph produced finite boundary path {p}"
                ))
            }
        }
    }
    Ok(out)
}

/// Criterion 5: the boundary correspondence is a range-preserving bijection
/// on all representable boundary paths with prefix at most 5, and both
/// openness witnesses verify against the membership oracle.
#[test]
fn c5_boundary_bijection_and_witnesses() {
    criterion(5, "boundary bijection and openness witnesses", || {
        let mut graphs = vec![fixtures::e_omega(), fixtures::e_ex()];
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        for _ in 0..50 {
            graphs.push(random_presentation(&mut rng, 5, 2));
        }
        for g in &graphs {
            let m = desing_map(g)?;
            let e = m.collapsed();

            // Forward after backward is the identity on boundary
            // representatives of the collapsed graph.
            for x in common::boundary_reps(e, 5, 24).map_err(err)? {
                let lam = phi_inf_inv(&m, &x).map_err(err)?;
                ensure(
                    lam.range() == x.range(),
                    format!("range not preserved backwards at {x}"),
                )?;
                let back = phi_inf(&m, &lam).map_err(err)?;
                ensure(back == x, format!("phi_inf(phi_inf_inv({x})) = {back}"))?;
            }

            // Backward after forward is the identity on surviving infinite
            // representatives of the original graph.
            for lam in surviving_infinite_reps(&m, 5, 24)? {
                let x = phi_inf(&m, &lam).map_err(err)?;
                ensure(
                    x.range() == lam.range(),
                    format!("range not preserved forwards at {lam}"),
                )?;
                let back = phi_inf_inv(&m, &x).map_err(err)?;
                ensure(back == lam, format!("phi_inf_inv(phi_inf({lam})) = {back}"))?;
            }

            // Openness witnesses, checked against the membership oracle.
            // Images and preimages are cached once per graph.
            let e_arc = e.clone();
            let stems = common::all_paths(&e_arc, 2, 2).map_err(err)?;
            let basics = common::basics_over(&e_arc, &stems, 1).map_err(err)?;
            let lams = surviving_infinite_reps(&m, 4, 16)?;
            let images: Vec<(pathspace::InfPathSpec, BoundaryPath)> = lams
                .iter()
                .map(|lam| Ok((lam.clone(), phi_inf(&m, lam).map_err(err)?)))
                .collect::<Result<_, String>>()?;
            for z in basics.iter().take(40) {
                for (lam, image) in &images {
                    if !member(&Point::from(image.clone()), z) {
                        continue;
                    }
                    let gamma = open_image_witness(&m, z, lam).map_err(err)?;
                    ensure(
                        lam.starts_with(&gamma),
                        format!("witness {gamma} does not cover {lam}"),
                    )?;
                    for (y, img) in &images {
                        if y.starts_with(&gamma) {
                            ensure(
                                member(&Point::from(img.clone()), z),
                                format!("{y} through {gamma} maps to {img} outside {z}"),
                            )?;
                        }
                    }
                }
            }

            let gammas = common::all_paths(m.original(), 3, 2).map_err(err)?;
            let xs = common::boundary_reps(e, 4, 16).map_err(err)?;
            let pulled: Vec<(BoundaryPath, pathspace::InfPathSpec)> = xs
                .iter()
                .map(|x| Ok((x.clone(), phi_inf_inv(&m, x).map_err(err)?)))
                .collect::<Result<_, String>>()?;
            for gamma in gammas.iter().take(60) {
                for (x, lam) in &pulled {
                    if !lam.starts_with(gamma) {
                        continue;
                    }
                    let basic = open_preimage_witness(&m, gamma, x).map_err(err)?;
                    ensure(
                        member(&Point::from(x.clone()), &basic),
                        format!("{x} missing from its own witness {basic}"),
                    )?;
                    for (y, back) in &pulled {
                        if member(&Point::from(y.clone()), &basic) {
                            ensure(
                                back.starts_with(gamma),
                                format!("{y} in {basic} pulls back to {back} outside Z({gamma})"),
                            )?;
                        }
                    }
                }
            }
        }
        Ok(())
    });
}

/// Criterion 6: q-projections are pairwise orthogonal idempotents, the
/// reconstruction identity is exact for every stem set with at most 6
/// members of length at most 3, and the norm equals the supremum of
/// character moduli over boundary representatives.
#[test]
fn c6_diagonal_exactness() {
    criterion(6, "diagonal exactness and the norm formula", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
        let mut graphs: Vec<PresentedGraph> = vec![fixtures::e_ex(), fixtures::e_omega()];
        for _ in 0..12 {
            graphs.push(random_presentation(&mut rng, 4, 1));
        }
        use rand::Rng;
        for g in graphs {
            let g = Arc::new(g);
            let pool = common::all_paths(&g, 3, 2).map_err(err)?;
            if pool.is_empty() {
                continue;
            }
            let enumerated_reps: Vec<BoundaryPath> =
                common::boundary_reps(&g, 5, 32).map_err(err)?;
            for _ in 0..4 {
                let size = rng.random_range(1..=6usize);
                let mut fset: Vec<Path> = Vec::new();
                for _ in 0..size {
                    let p = pool[rng.random_range(0..pool.len())].clone();
                    if !fset.contains(&p) {
                        fset.push(p);
                    }
                }
                fset.sort();

                // Orthogonality and idempotence.
                for mu in &fset {
                    let q = q_projection(&g, &fset, mu).map_err(err)?;
                    ensure(
                        q.multiply(&q).map_err(err)?.equals(&q).map_err(err)?,
                        format!("q_{mu} not idempotent"),
                    )?;
                    for nu in &fset {
                        if nu != mu {
                            let q2 = q_projection(&g, &fset, nu).map_err(err)?;
                            ensure(
                                q.multiply(&q2)
                                    .map_err(err)?
                                    .is_zero_element()
                                    .map_err(err)?,
                                format!("q_{mu} and q_{nu} not orthogonal"),
                            )?;
                        }
                    }
                }

                // Reconstruction: P_ν = Σ of q over extensions inside F.
                for nu in &fset {
                    let mut sum = DiagonalElement::zero(g.clone());
                    for ext in &fset {
                        if nu.is_prefix_of(ext) {
                            sum = sum
                                .add(&q_projection(&g, &fset, ext).map_err(err)?)
                                .map_err(err)?;
                        }
                    }
                    let p_nu = DiagonalElement::projection(g.clone(), nu.clone()).map_err(err)?;
                    ensure(
                        sum.equals(&p_nu).map_err(err)?,
                        format!("reconstruction failed at {nu}"),
                    )?;
                }

                // Norm formula against the character supremum.
                let mut terms = Vec::new();
                for p in &fset {
                    let re = rng.random_range(-3i64..=3);
                    let im = rng.random_range(-2i64..=2);
                    let c = pathspace::diagonal::Scalar::new(
                        num_rational::BigRational::from_integer(re.into()),
                        num_rational::BigRational::from_integer(im.into()),
                    );
                    terms.push((p.clone(), c));
                }
                let a = DiagonalElement::from_terms(g.clone(), terms).map_err(err)?;
                let norm_sq = a.norm_squared().map_err(err)?;

                let mut sup = num_rational::BigRational::zero();
                let mut reps = enumerated_reps.clone();
                for (stem, _) in q_decompose(&a).map_err(err)? {
                    if let Some(w) =
                        q_nonzero_witness(&g, &a.support(), &stem).map_err(err)?
                    {
                        reps.push(w);
                    }
                }
                for x in &reps {
                    let v = a.eval(x).map_err(err)?.modulus_squared();
                    if v > sup {
                        sup = v.clone();
                    }
                    ensure(
                        v <= norm_sq,
                        format!("character at {x} exceeds the norm"),
                    )?;
                }
                ensure(
                    sup == norm_sq,
                    format!("norm² {norm_sq} not attained; sup over representatives {sup}"),
                )?;
            }
        }
        Ok(())
    });
}

/// Criterion 7: the summation relation at finite depth: `P_v` equals the
/// sum of `P_ν` over `vE^{≤n}` pointwise on boundary representatives to
/// depth 6, for every vertex and `n ≤ 3` with the set finite.
#[test]
fn c7_vertex_resolution_model_check() {
    criterion(7, "finite-depth vertex resolutions", || {
        for (name, g) in fixtures::all() {
            let g = Arc::new(g);
            for v in common::core_vertices(&g) {
                for n in 0..=3u64 {
                    let pathspace::path::ELeqN::Finite(paths) =
                        pathspace::path::e_leq_n(&g, &v, n).map_err(err)?
                    else {
                        continue;
                    };
                    let p_v =
                        DiagonalElement::projection(g.clone(), Path::at(v.clone())).map_err(err)?;
                    let mut sum = DiagonalElement::zero(g.clone());
                    for p in &paths {
                        sum = sum
                            .add(&DiagonalElement::projection(g.clone(), p.clone()).map_err(err)?)
                            .map_err(err)?;
                    }
                    let diff = p_v.sub(&sum).map_err(err)?;
                    ensure(
                        diff.is_zero_element().map_err(err)?,
                        format!("{name}: resolution at {v}, n={n}, not algebraically zero"),
                    )?;
                    for x in common::boundary_reps(&g, 6, 48).map_err(err)? {
                        if x.range() != &v {
                            continue;
                        }
                        ensure(
                            diff.eval(&x).map_err(err)?.is_zero(),
                            format!("{name}: resolution at {v}, n={n}, fails at {x}"),
                        )?;
                    }
                }
            }
        }
        Ok(())
    });
}

/// Criterion 8: the intertwining diagram commutes for every representable
/// surviving infinite path (prefix ≤ 5) against every representable stem of
/// length ≤ 4, and the compression recursion agrees pointwise with direct
/// compression.
#[test]
fn c8_intertwining_diagram() {
    criterion(8, "intertwining diagram and compression recursion", || {
        let mut graphs = vec![fixtures::e_omega(), fixtures::e_ex()];
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
        for _ in 0..20 {
            graphs.push(random_presentation(&mut rng, 4, 1));
        }
        for g in &graphs {
            let m = desing_map(g)?;
            let f_arc = Arc::new(m.original().clone());
            let e_arc = Arc::new(m.collapsed().clone());
            let xs = surviving_infinite_reps(&m, 5, 24)?;
            let mus = common::all_paths(&e_arc, 4, 2).map_err(err)?;
            for x in xs.iter().take(20) {
                for mu in mus.iter().take(80) {
                    ensure(
                        diagram_check(&m, &f_arc, &e_arc, x, mu).map_err(err)?,
                        format!("diagram fails at x={x}, mu={mu}"),
                    )?;
                }
            }
            let f_paths = common::all_paths(&f_arc, 4, 2).map_err(err)?;
            let surviving_range: Vec<&Path> = f_paths
                .iter()
                .filter(|p| m.survives(p.range()))
                .collect();
            for mu in surviving_range.iter().take(60) {
                for x in xs.iter().take(8) {
                    ensure(
                        reduction_matches_compression(&m, &f_arc, &e_arc, mu, x)
                            .map_err(err)?,
                        format!("reduction vs compression differ at mu={mu}, x={x}"),
                    )?;
                }
            }
        }
        Ok(())
    });
}

/// Criterion 9: characters are realized by boundary paths — rebuilding the
/// path from its prefix family inverts the evaluation map on every
/// representative, and distinct representatives to depth 6 are separated by
/// some projection.
#[test]
fn c9_spectrum_reconstruction() {
    criterion(9, "spectrum reconstruction and injectivity", || {
        let mut graphs = vec![
            fixtures::e_pt(),
            fixtures::e_omega(),
            fixtures::e_ex(),
            fixtures::f_ex(),
            fixtures::f_omega(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
        for _ in 0..10 {
            graphs.push(random_presentation(&mut rng, 4, 1));
        }
        for g in graphs {
            let g = Arc::new(g);
            let reps = common::boundary_reps(&g, 6, 32).map_err(err)?;
            // Surjectivity at desk scale: prefix families rebuild their
            // boundary paths.
            for x in &reps {
                let family = match x {
                    BoundaryPath::Finite(p) => PrefixFamily::Terminating(
                        (0..=p.len()).map(|k| p.prefix(k)).collect(),
                    ),
                    BoundaryPath::Infinite(s) => PrefixFamily::Extending(s.clone()),
                };
                let rebuilt = character_to_path(&g, &family).map_err(err)?;
                ensure(rebuilt == *x, format!("{x} rebuilt as {rebuilt}"))?;
            }
            // Injectivity: representatives that differ within their first
            // six edges disagree on some projection of depth ≤ 6, built
            // from the first disagreement.
            for (i, x) in reps.iter().enumerate() {
                for y in reps.iter().skip(i + 1) {
                    if x.range() != y.range() {
                        continue;
                    }
                    let Some(d) = (1..=6u64).find(|d| x.edge_at(*d) != y.edge_at(*d))
                    else {
                        continue;
                    };
                    // The side that still has an edge at depth d yields the
                    // separating stem.
                    let stem = match (truncate_rep(x, d), truncate_rep(y, d)) {
                        (Some(s), _) if x.edge_at(d).is_some() => s,
                        (_, Some(s)) => s,
                        (Some(s), None) => s,
                        (None, None) => unreachable!("edges differ at depth {d}"),
                    };
                    let p = DiagonalElement::projection(g.clone(), stem).map_err(err)?;
                    ensure(
                        p.eval(x).map_err(err)? != p.eval(y).map_err(err)?,
                        format!("{x} and {y} not separated by depth {d}"),
                    )?;
                }
            }
            // Characters land where q-projections are nonvanishing.
            let pool = common::all_paths(&g, 2, 2).map_err(err)?;
            for mu in pool.iter().take(12) {
                let fset = vec![mu.clone()];
                ensure(
                    q_is_nonzero(&g, &fset, mu).map_err(err)?,
                    format!("singleton q at {mu} should never vanish"),
                )?;
            }
        }
        Ok(())
    });
}

fn truncate_rep(x: &BoundaryPath, d: u64) -> Option<Path> {
    match x {
        BoundaryPath::Finite(p) => {
            if d <= p.len() {
                Some(p.prefix(d))
            } else {
                None
            }
        }
        BoundaryPath::Infinite(s) => Some(s.truncate(d)),
    }
}
