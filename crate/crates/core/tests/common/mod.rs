//! Shared helpers for the integration suites.

use pathspace::cylinder::{CylinderBasic, Point};
use pathspace::graph::{EdgeRef, PresentedGraph, VertexRef};
use pathspace::path::{enumerate_paths_capped, BoundaryPath, Path};
use pathspace::Result;

pub fn core_vertices(g: &PresentedGraph) -> Vec<VertexRef> {
    g.core_vertices()
        .map(|v| VertexRef::core(v.clone()))
        .collect()
}

/// All finite paths up to `max_len` from every core vertex, with family
/// indices capped.
pub fn all_paths(g: &PresentedGraph, max_len: u64, family_cap: u64) -> Result<Vec<Path>> {
    let mut out = Vec::new();
    for v in core_vertices(g) {
        out.extend(enumerate_paths_capped(g, &v, max_len, family_cap)?);
    }
    Ok(out)
}

/// Finite paths as points of the path space.
pub fn finite_points(g: &PresentedGraph, max_len: u64, family_cap: u64) -> Result<Vec<Point>> {
    Ok(all_paths(g, max_len, family_cap)?
        .into_iter()
        .map(Point::Finite)
        .collect())
}

/// Boundary representatives over all core vertices.
pub fn boundary_reps(
    g: &PresentedGraph,
    depth: u64,
    limit: usize,
) -> Result<Vec<BoundaryPath>> {
    let mut out = Vec::new();
    for v in core_vertices(g) {
        out.extend(pathspace::path::boundary_paths(g, &v, depth, limit)?.items);
    }
    Ok(out)
}

/// Every basic `Z(stem \ G)` with the given stems and forbidden sets of size
/// at most `max_forbidden`, drawn from the finite incoming edges plus the
/// first few family edges at the stem's source.
pub fn basics_over(
    g: &PresentedGraph,
    stems: &[Path],
    max_forbidden: usize,
) -> Result<Vec<CylinderBasic>> {
    let mut out = Vec::new();
    for stem in stems {
        let src = stem.source(g)?;
        let candidates: Vec<EdgeRef> = g.incoming_edges(&src, 5)?;
        out.push(CylinderBasic::new(g, stem.clone(), Default::default())?);
        if max_forbidden >= 1 {
            for e in &candidates {
                out.push(CylinderBasic::new(
                    g,
                    stem.clone(),
                    [e.clone()].into_iter().collect(),
                )?);
            }
        }
        if max_forbidden >= 2 {
            for (i, a) in candidates.iter().enumerate() {
                for b in candidates.iter().skip(i + 1) {
                    out.push(CylinderBasic::new(
                        g,
                        stem.clone(),
                        [a.clone(), b.clone()].into_iter().collect(),
                    )?);
                }
            }
        }
    }
    Ok(out)
}
