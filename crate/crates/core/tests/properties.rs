//! Property suites: set-theoretic oracles against the symbolic operations.

mod common;

use proptest::prelude::*;

use pathspace::cylinder::{
    cluster_point, intersect, member, member_general, refine_to_basic, separating_basics,
    GeneralCylinder, Point,
};
use pathspace::graph::{PresentedGraph, VertexRef};
use pathspace::path::{common_extension, compose, BoundaryPath, Path};
use pathspace::seq::EpSeq;

fn build_row_finite(n: usize, pairs: &[(usize, usize)]) -> PresentedGraph {
    let mut g = PresentedGraph::new();
    for i in 0..n {
        g.add_vertex(format!("v{i}")).unwrap();
    }
    for (i, (s, r)) in pairs.iter().enumerate() {
        g.add_edge(format!("c{i}"), format!("v{}", s % n), format!("v{}", r % n))
            .unwrap();
    }
    g
}

fn build_presentation(
    n: usize,
    pairs: &[(usize, usize)],
    families: &[(usize, Vec<usize>, Vec<usize>)],
) -> PresentedGraph {
    let mut g = build_row_finite(n, pairs);
    for (i, (range, prefix, cycle)) in families.iter().enumerate() {
        let name = |k: usize| format!("v{}", k % n);
        g.add_family(
            format!("f{i}"),
            name(*range),
            EpSeq::Periodic {
                prefix: prefix.iter().map(|k| name(*k)).collect(),
                cycle: cycle.iter().map(|k| name(*k)).collect(),
            },
        )
        .unwrap();
    }
    g
}

prop_compose! {
    fn row_finite_graph()(n in 1..5usize)(
        n in Just(n),
        pairs in prop::collection::vec((0..n, 0..n), 0..=6),
    ) -> PresentedGraph {
        build_row_finite(n, &pairs)
    }
}

prop_compose! {
    fn presentation()(n in 1..5usize)(
        n in Just(n),
        pairs in prop::collection::vec((0..n, 0..n), 0..=5),
        families in prop::collection::vec(
            (0..n, prop::collection::vec(0..n, 0..=2), prop::collection::vec(0..n, 1..=3)),
            0..=2,
        ),
    ) -> PresentedGraph {
        build_presentation(n, &pairs, &families)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Pointwise, intersecting two basics is intersecting their membership
    /// sets over every path enumerable to depth 6.
    #[test]
    fn intersect_matches_pointwise_sets(g in row_finite_graph(), pick in any::<(u32, u32)>()) {
        let stems = common::all_paths(&g, 3, 4).unwrap();
        let basics = common::basics_over(&g, &stems, 1).unwrap();
        prop_assume!(!basics.is_empty());
        let z1 = &basics[pick.0 as usize % basics.len()];
        let z2 = &basics[pick.1 as usize % basics.len()];
        let points = common::finite_points(&g, 6, 6).unwrap();
        let meet = intersect(z1, z2);
        for w in &points {
            let expected = member(w, z1) && member(w, z2);
            let got = meet.as_ref().map(|z| member(w, z)).unwrap_or(false);
            prop_assert_eq!(expected, got, "{} vs {} ∩ {}", w, z1, z2);
        }
    }

    /// Two stems admit a common extension exactly when their whole
    /// cylinders intersect.
    #[test]
    fn common_extension_matches_cylinder_intersection(
        g in row_finite_graph(),
        pick in any::<(u32, u32)>(),
    ) {
        let stems = common::all_paths(&g, 3, 4).unwrap();
        prop_assume!(!stems.is_empty());
        let mu = &stems[pick.0 as usize % stems.len()];
        let nu = &stems[pick.1 as usize % stems.len()];
        prop_assume!(mu.range() == nu.range());
        let z1 = pathspace::cylinder::CylinderBasic::whole(mu.clone());
        let z2 = pathspace::cylinder::CylinderBasic::whole(nu.clone());
        let nonempty = intersect(&z1, &z2).is_some();
        prop_assert_eq!(common_extension(mu, nu).unwrap().is_some(), nonempty);
    }

    /// Distinct points are separated by disjoint basics built from their
    /// first disagreement.
    #[test]
    fn distinct_points_are_separated(g in presentation(), pick in any::<(u32, u32)>()) {
        let reps = common::boundary_reps(&g, 3, 16).unwrap();
        prop_assume!(reps.len() >= 2);
        let x = Point::from(reps[pick.0 as usize % reps.len()].clone());
        let y = Point::from(reps[pick.1 as usize % reps.len()].clone());
        prop_assume!(x.range() == y.range());
        match separating_basics(&g, &x, &y).unwrap() {
            None => prop_assert_eq!(x, y),
            Some((zx, zy)) => {
                prop_assert!(member(&x, &zx) && !member(&y, &zx));
                prop_assert!(member(&y, &zy) && !member(&x, &zy));
                prop_assert!(intersect(&zx, &zy).is_none());
            }
        }
    }

    /// Refining a path-complement set around a point keeps the point and
    /// stays inside the set, over every enumerable path to depth 6.
    #[test]
    fn refinement_is_sound(
        g in presentation(),
        pick in any::<(u32, u32, u32)>(),
    ) {
        let stems = common::all_paths(&g, 2, 2).unwrap();
        prop_assume!(!stems.is_empty());
        let stem = stems[pick.0 as usize % stems.len()].clone();
        let src = stem.source(&g).unwrap();
        let mut extensions = pathspace::path::enumerate_paths_capped(&g, &src, 2, 2).unwrap();
        extensions.retain(|p| !p.is_empty());
        let mut forbidden = std::collections::BTreeSet::new();
        if !extensions.is_empty() {
            forbidden.insert(extensions[pick.1 as usize % extensions.len()].clone());
            forbidden.insert(extensions[pick.2 as usize % extensions.len()].clone());
        }
        let z = GeneralCylinder::new(&g, stem, forbidden).unwrap();

        let mut points: Vec<Point> = common::finite_points(&g, 4, 2).unwrap();
        points.extend(
            common::boundary_reps(&g, 3, 16)
                .unwrap()
                .into_iter()
                .map(Point::from),
        );
        let inside: Vec<&Point> = points.iter().filter(|w| member_general(w, &z)).collect();
        prop_assume!(!inside.is_empty());
        let lambda = inside[pick.0 as usize % inside.len()];
        let basic = refine_to_basic(&g, &z, lambda).unwrap();
        prop_assert!(member(lambda, &basic), "{} lost from {}", lambda, basic);
        for w in &points {
            if member(w, &basic) {
                prop_assert!(member_general(w, &z), "{} escapes {} ⊄ {}", w, basic, z);
            }
        }
    }

    /// Truncated incoming-edge listings are prefixes of longer ones.
    #[test]
    fn incoming_edges_are_prefix_monotone(g in presentation(), k in 0..6usize) {
        for v in common::core_vertices(&g) {
            let shorter = g.incoming_edges(&v, k).unwrap();
            let longer = g.incoming_edges(&v, k + 1).unwrap();
            prop_assert!(shorter.iter().zip(longer.iter()).all(|(a, b)| a == b));
            prop_assert!(longer.len() <= k + 1);
        }
    }

    /// A presentation is row-finite exactly when it declares no families.
    #[test]
    fn row_finiteness_is_family_freeness(g in presentation()) {
        let has_infinite = common::core_vertices(&g).iter().any(|v| {
            matches!(g.in_degree(v), Ok(pathspace::Degree::Infinite))
        });
        prop_assert_eq!(g.is_row_finite(), !has_infinite);
    }

    /// Composition is associative wherever defined, with vertices as
    /// two-sided units.
    #[test]
    fn composition_associativity(g in row_finite_graph(), pick in any::<(u32, u32)>()) {
        let paths = common::all_paths(&g, 4, 4).unwrap();
        prop_assume!(!paths.is_empty());
        let long = &paths[pick.0 as usize % paths.len()];
        prop_assume!(long.len() >= 2);
        let cut_a = 1 + (pick.1 as u64 % (long.len() - 1));
        let a = long.prefix(cut_a);
        let rest = Path::from_edges(&g, long.edges()[cut_a as usize..].to_vec()).unwrap();
        let left = compose(&g, &a, &rest).unwrap();
        prop_assert_eq!(&left, long);
        // Unit laws.
        let at_range = Path::at(long.range().clone());
        let at_source = Path::at(long.source(&g).unwrap());
        prop_assert_eq!(&compose(&g, &at_range, long).unwrap(), long);
        prop_assert_eq!(&compose(&g, long, &at_source).unwrap(), long);
    }

    /// The cluster construction recovers prefixes of a convergent sequence.
    #[test]
    fn cluster_point_recovers_limits(g in presentation(), pick in any::<u32>()) {
        let reps = common::boundary_reps(&g, 3, 16).unwrap();
        let specs: Vec<_> = reps
            .iter()
            .filter_map(|r| match r {
                BoundaryPath::Infinite(s) => Some(s.clone()),
                BoundaryPath::Finite(_) => None,
            })
            .collect();
        prop_assume!(!specs.is_empty());
        let spec = &specs[pick as usize % specs.len()];
        let ws: Vec<Point> = (1..=8).map(|k| Point::Finite(spec.truncate(k))).collect();
        let out = cluster_point(&g, &ws, 3, None).unwrap();
        prop_assert_eq!(out.omega, spec.truncate(3));
        prop_assert!(out.unstable.is_empty());
    }

    /// Graph files round-trip through the canonical printer.
    #[test]
    fn graph_text_round_trip(g in presentation()) {
        let text = pathspace::textio::print_graph(&g);
        let back = pathspace::textio::parse_graph(&text).unwrap();
        prop_assert_eq!(back, g);
    }
}

#[test]
fn tail_vertices_have_expected_degrees() {
    let g = pathspace::fixtures::f_omega();
    for j in 1..=8u64 {
        let entries = g.entries_at("tv", j).len() as u64;
        assert_eq!(
            g.in_degree(&VertexRef::tail("tv", j)).unwrap(),
            pathspace::Degree::Finite(1 + entries)
        );
    }
}
