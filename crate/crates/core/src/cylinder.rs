//! Basic open sets of the cylinder topology on the path space.
//!
//! `Z(μ)` is the set of finite and infinite paths extending `μ`;
//! `Z(μ \ G)` removes the extensions that continue with a member of `G`.
//! With `G` a finite set of edges at `s(μ)` these sets form a basis; with
//! finite sets of *paths* they generate the same topology, and
//! [`refine_to_basic`] carries out that reduction constructively around a
//! given point.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{EdgeRef, PresentedGraph, VertexRef};
use crate::path::{BoundaryPath, InfPathSpec, Path};

/// A point of the path space: a finite path or a represented infinite path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Finite(Path),
    Infinite(InfPathSpec),
}

impl Point {
    pub fn range(&self) -> &VertexRef {
        match self {
            Point::Finite(p) => p.range(),
            Point::Infinite(s) => s.range(),
        }
    }

    pub fn len(&self) -> Option<u64> {
        match self {
            Point::Finite(p) => Some(p.len()),
            Point::Infinite(_) => None,
        }
    }

    pub fn edge_at(&self, i: u64) -> Option<EdgeRef> {
        match self {
            Point::Finite(p) => p.edge_at(i).cloned(),
            Point::Infinite(s) => Some(s.edge_at(i)),
        }
    }

    pub fn starts_with(&self, stem: &Path) -> bool {
        match self {
            Point::Finite(p) => stem.is_prefix_of(p),
            Point::Infinite(s) => s.starts_with(stem),
        }
    }

    /// First `n` edges, or fewer for a shorter finite point.
    pub fn truncate(&self, n: u64) -> Path {
        match self {
            Point::Finite(p) => p.prefix(n),
            Point::Infinite(s) => s.truncate(n),
        }
    }
}

impl From<BoundaryPath> for Point {
    fn from(bp: BoundaryPath) -> Self {
        match bp {
            BoundaryPath::Finite(p) => Point::Finite(p),
            BoundaryPath::Infinite(s) => Point::Infinite(s),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(p) => write!(f, "{p}"),
            Point::Infinite(s) => write!(f, "{s}"),
        }
    }
}

/// `Z(stem \ forbidden)` with forbidden single edges at `s(stem)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CylinderBasic {
    pub stem: Path,
    pub forbidden: BTreeSet<EdgeRef>,
}

impl CylinderBasic {
    pub fn new(g: &PresentedGraph, stem: Path, forbidden: BTreeSet<EdgeRef>) -> Result<Self> {
        stem.check_in(g)?;
        let junction = stem.source(g)?;
        for e in &forbidden {
            if g.range(e)? != junction {
                return Err(Error::Precondition(format!(
                    "forbidden edge `{e}` does not have range `{junction}`"
                )));
            }
        }
        Ok(CylinderBasic { stem, forbidden })
    }

    pub fn whole(stem: Path) -> Self {
        CylinderBasic {
            stem,
            forbidden: BTreeSet::new(),
        }
    }
}

impl fmt::Display for CylinderBasic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.forbidden.is_empty() {
            write!(f, "Z({})", self.stem)
        } else {
            let parts: Vec<String> = self.forbidden.iter().map(|e| e.to_string()).collect();
            write!(f, "Z({} \\ {{{}}})", self.stem, parts.join(", "))
        }
    }
}

/// `Z(stem \ forbidden)` with forbidden finite *paths* at `s(stem)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GeneralCylinder {
    pub stem: Path,
    pub forbidden: BTreeSet<Path>,
}

impl GeneralCylinder {
    pub fn new(g: &PresentedGraph, stem: Path, forbidden: BTreeSet<Path>) -> Result<Self> {
        stem.check_in(g)?;
        let junction = stem.source(g)?;
        for p in &forbidden {
            p.check_in(g)?;
            if *p.range() != junction {
                return Err(Error::Precondition(format!(
                    "forbidden path `{p}` does not have range `{junction}`"
                )));
            }
        }
        Ok(GeneralCylinder { stem, forbidden })
    }
}

impl fmt::Display for GeneralCylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.forbidden.is_empty() {
            write!(f, "Z({})", self.stem)
        } else {
            let parts: Vec<String> = self.forbidden.iter().map(|p| p.to_string()).collect();
            write!(f, "Z({} \\ {{{}}})", self.stem, parts.join(", "))
        }
    }
}

/// Pointwise membership in a basic set: `w` extends the stem and its
/// continuation does not begin with a forbidden edge. Decidable for
/// infinite specs by unfolding one edge past the stem.
pub fn member(w: &Point, z: &CylinderBasic) -> bool {
    if !w.starts_with(&z.stem) {
        return false;
    }
    match w.edge_at(z.stem.len() + 1) {
        None => true,
        Some(next) => !z.forbidden.contains(&next),
    }
}

/// Membership with forbidden paths: the continuation must not extend any of
/// them. Unfolds to the stem length plus the longest forbidden path.
pub fn member_general(w: &Point, z: &GeneralCylinder) -> bool {
    if !w.starts_with(&z.stem) {
        return false;
    }
    let base = z.stem.len();
    'next_forbidden: for p in &z.forbidden {
        if let Some(n) = w.len() {
            if n < base + p.len() {
                continue 'next_forbidden;
            }
        }
        for (i, e) in p.edges().iter().enumerate() {
            if w.edge_at(base + i as u64 + 1).as_ref() != Some(e) {
                continue 'next_forbidden;
            }
        }
        return false;
    }
    true
}

/// Intersection of two basics, which is again a basic or empty: stems must
/// nest; forbidden edges of the shorter stem either kill the intersection
/// (when they lie along the longer stem), transfer (equal stems) or are
/// discarded (diverging continuations).
pub fn intersect(z1: &CylinderBasic, z2: &CylinderBasic) -> Option<CylinderBasic> {
    let (short, long) = if z1.stem.len() <= z2.stem.len() {
        (z1, z2)
    } else {
        (z2, z1)
    };
    if !short.stem.is_prefix_of(&long.stem) {
        return None;
    }
    let mut forbidden = long.forbidden.clone();
    if short.stem.len() == long.stem.len() {
        forbidden.extend(short.forbidden.iter().cloned());
    } else {
        let along = long.stem.edge_at(short.stem.len() + 1).unwrap();
        if short.forbidden.contains(along) {
            return None;
        }
    }
    Some(CylinderBasic {
        stem: long.stem.clone(),
        forbidden,
    })
}

/// Refines a path-complement set around one of its points into an
/// edge-complement basic `Z(α \ F)` with `λ ∈ Z(α \ F) ⊆ Z`.
///
/// For infinite `λ` the stem is `λ` truncated at the length of the longest
/// forbidden extension (the stem length itself when there is none) and no
/// edges are forbidden. For finite `λ` the stem is `λ` and `F` collects the
/// next edge of every forbidden extension that is longer than `λ` and still
/// compatible with it.
pub fn refine_to_basic(
    g: &PresentedGraph,
    z: &GeneralCylinder,
    lambda: &Point,
) -> Result<CylinderBasic> {
    if !member_general(lambda, z) {
        return Err(Error::NotInCylinder);
    }
    match lambda {
        Point::Infinite(spec) => {
            let n = z
                .forbidden
                .iter()
                .map(|p| z.stem.len() + p.len())
                .max()
                .unwrap_or(z.stem.len());
            Ok(CylinderBasic::whole(spec.truncate(n)))
        }
        Point::Finite(lam) => {
            let mut fset = BTreeSet::new();
            for p in &z.forbidden {
                let full_len = z.stem.len() + p.len();
                if full_len <= lam.len() {
                    continue;
                }
                let full: Vec<&EdgeRef> = z.stem.edges().iter().chain(p.edges()).collect();
                if full[..lam.len() as usize]
                    .iter()
                    .zip(lam.edges())
                    .all(|(a, b)| **a == *b)
                {
                    fset.insert(full[lam.len() as usize].clone());
                }
            }
            CylinderBasic::new(g, lam.clone(), fset)
        }
    }
}

/// Outcome of the limit extraction of [`cluster_point`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPoint {
    /// The longest stem below `depth` hit by the whole window.
    pub omega: Path,
    /// Stems whose membership is mixed within the window, i.e. has not
    /// stabilized yet.
    pub unstable: Vec<Path>,
    pub window: usize,
}

/// Extracts the limit prefix determined by a sequence of points of `Z(v)`.
///
/// True cofinality is not decidable from a finite list, so it is
/// approximated by a window: a stem counts as eventually hit when all of
/// the last `window` points extend it (default window: half the input).
/// Stems of length at most `depth` hit by part of the window only are
/// reported as unstable rather than silently resolved, and incomparable
/// stems hit by the whole window are an error rather than a choice.
pub fn cluster_point(
    g: &PresentedGraph,
    ws: &[Point],
    depth: u64,
    window: Option<usize>,
) -> Result<ClusterPoint> {
    let first = ws
        .first()
        .ok_or_else(|| Error::Precondition("empty input sequence".into()))?;
    let v = first.range().clone();
    for w in ws {
        if *w.range() != v {
            return Err(Error::RangeMismatch(v.to_string(), w.range().to_string()));
        }
    }
    if !g.has_vertex(&v) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let window = window.unwrap_or_else(|| (ws.len() / 2).max(1)).clamp(1, ws.len());
    let tail = &ws[ws.len() - window..];

    let mut candidates: BTreeSet<Path> = BTreeSet::new();
    for w in tail {
        let upto = w.len().unwrap_or(depth).min(depth);
        for k in 0..=upto {
            candidates.insert(w.truncate(k));
        }
    }
    let mut hit_by_all: Vec<Path> = Vec::new();
    let mut unstable = Vec::new();
    for mu in candidates {
        let hits = tail.iter().filter(|w| w.starts_with(&mu)).count();
        if hits == window {
            hit_by_all.push(mu);
        } else if hits > 0 {
            unstable.push(mu);
        }
    }
    hit_by_all.sort_by_key(|p| p.len());
    for pair in hit_by_all.windows(2) {
        if !pair[0].is_prefix_of(&pair[1]) {
            return Err(Error::IncomparableStems(
                pair[0].to_string(),
                pair[1].to_string(),
            ));
        }
    }
    let omega = hit_by_all.pop().unwrap_or_else(|| Path::at(v));
    Ok(ClusterPoint {
        omega,
        unstable,
        window,
    })
}

/// Disjoint basics separating two distinct points, built from their first
/// disagreement. Returns `None` when the points are equal (specs compare in
/// canonical form).
pub fn separating_basics(
    g: &PresentedGraph,
    x: &Point,
    y: &Point,
) -> Result<Option<(CylinderBasic, CylinderBasic)>> {
    if x == y {
        return Ok(None);
    }
    if x.range() != y.range() {
        return Err(Error::RangeMismatch(
            x.range().to_string(),
            y.range().to_string(),
        ));
    }
    let mut i = 1u64;
    loop {
        match (x.edge_at(i), y.edge_at(i)) {
            (Some(a), Some(b)) if a == b => i += 1,
            (Some(_), Some(_)) => {
                return Ok(Some((
                    CylinderBasic::whole(x.truncate(i)),
                    CylinderBasic::whole(y.truncate(i)),
                )));
            }
            (None, Some(b)) => {
                return Ok(Some((
                    CylinderBasic::new(g, x.truncate(i - 1), [b].into_iter().collect())?,
                    CylinderBasic::whole(y.truncate(i)),
                )));
            }
            (Some(a), None) => {
                return Ok(Some((
                    CylinderBasic::whole(x.truncate(i)),
                    CylinderBasic::new(g, y.truncate(i - 1), [a].into_iter().collect())?,
                )));
            }
            (None, None) => {
                // Same finite edge sequence; canonical specs and equal paths
                // were excluded above, so one side is finite and the other
                // infinite of a different shape only when specs differ
                // beyond every index — impossible for canonical forms.
                return Err(Error::Internal(format!(
                    "points `{x}` and `{y}` differ but agree at every index"
                )));
            }
        }
    }
}

/// Brute-force membership table of a basic over an enumerated point set,
/// used as the set-theoretic oracle in tests and verification sweeps.
pub fn membership_bitmap(points: &[Point], z: &CylinderBasic) -> Vec<bool> {
    points.iter().map(|p| member(p, z)).collect()
}
