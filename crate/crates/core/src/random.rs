//! Seeded random presentations for property sweeps.

use rand::Rng;

use crate::graph::PresentedGraph;
use crate::seq::EpSeq;

/// A random valid tail-free presentation with up to `max_core` core
/// vertices and up to `max_families` infinite families. Sources, sinks and
/// infinite receivers all occur with reasonable frequency.
pub fn random_presentation(
    rng: &mut impl Rng,
    max_core: usize,
    max_families: usize,
) -> PresentedGraph {
    let n = rng.random_range(1..=max_core);
    let mut g = PresentedGraph::new();
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    for v in &vertices {
        g.add_vertex(v.clone()).unwrap();
    }
    let edge_count = rng.random_range(0..=2 * n);
    for i in 0..edge_count {
        let src = &vertices[rng.random_range(0..n)];
        let rngv = &vertices[rng.random_range(0..n)];
        g.add_edge(format!("c{i}"), src.clone(), rngv.clone())
            .unwrap();
    }
    let fam_count = rng.random_range(0..=max_families);
    for i in 0..fam_count {
        let range = vertices[rng.random_range(0..n)].clone();
        let prefix_len = rng.random_range(0..=2usize);
        let cycle_len = rng.random_range(1..=3usize);
        let mut prefix = Vec::with_capacity(prefix_len);
        for _ in 0..prefix_len {
            prefix.push(vertices[rng.random_range(0..n)].clone());
        }
        let mut cycle = Vec::with_capacity(cycle_len);
        for _ in 0..cycle_len {
            cycle.push(vertices[rng.random_range(0..n)].clone());
        }
        g.add_family(format!("f{i}"), range, EpSeq::Periodic { prefix, cycle })
            .unwrap();
    }
    debug_assert!(g.validate().is_valid());
    g
}

/// A random valid row-finite presentation (core only).
pub fn random_row_finite(
    rng: &mut impl Rng,
    max_vertices: usize,
    max_edges: usize,
) -> PresentedGraph {
    let n = rng.random_range(1..=max_vertices);
    let mut g = PresentedGraph::new();
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    for v in &vertices {
        g.add_vertex(v.clone()).unwrap();
    }
    let edge_count = rng.random_range(0..=max_edges);
    for i in 0..edge_count {
        let src = &vertices[rng.random_range(0..n)];
        let rngv = &vertices[rng.random_range(0..n)];
        g.add_edge(format!("c{i}"), src.clone(), rngv.clone())
            .unwrap();
    }
    debug_assert!(g.validate().is_valid());
    g
}
