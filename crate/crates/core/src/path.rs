//! Finite paths, finitely described infinite paths, and boundary paths.
//!
//! Paths extend at their source end. An infinite path is representable here
//! only if it is eventually periodic or eventually follows a tail forever;
//! these are exactly the infinite paths of a presented graph that admit a
//! finite certificate, and the class is closed under every operation in this
//! crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Degree, EdgeRef, PresentedGraph, VertexRef};
use crate::seq::EpSeq;

/// A finite path. `edges[0]` is the edge at the range end; each following
/// edge attaches to the source of the previous one. A path of length zero
/// is a vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    base: VertexRef,
    edges: Vec<EdgeRef>,
}

impl Path {
    /// The length-zero path at a vertex.
    pub fn at(v: VertexRef) -> Self {
        Path {
            base: v,
            edges: Vec::new(),
        }
    }

    /// Builds a nonempty path, checking that consecutive edges compose.
    pub fn from_edges(g: &PresentedGraph, edges: Vec<EdgeRef>) -> Result<Self> {
        let first = edges.first().ok_or(Error::EmptyPath)?;
        let base = g.range(first)?;
        let path = Path { base, edges };
        path.check_composable(g)?;
        Ok(path)
    }

    fn check_composable(&self, g: &PresentedGraph) -> Result<()> {
        for pair in self.edges.windows(2) {
            let s = g.source(&pair[0])?;
            let r = g.range(&pair[1])?;
            if s != r {
                return Err(Error::JunctionMismatch {
                    left: pair[0].to_string(),
                    at: s.to_string(),
                    right: pair[1].to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeRef] {
        &self.edges
    }

    /// 1-based edge access.
    pub fn edge_at(&self, i: u64) -> Option<&EdgeRef> {
        if i == 0 {
            None
        } else {
            self.edges.get(i as usize - 1)
        }
    }

    pub fn range(&self) -> &VertexRef {
        &self.base
    }

    pub fn source(&self, g: &PresentedGraph) -> Result<VertexRef> {
        match self.edges.last() {
            None => Ok(self.base.clone()),
            Some(e) => g.source(e),
        }
    }

    /// First `n` edges as a path (the whole path if shorter).
    pub fn prefix(&self, n: u64) -> Path {
        Path {
            base: self.base.clone(),
            edges: self
                .edges
                .iter()
                .take(n as usize)
                .cloned()
                .collect(),
        }
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.base == other.base
            && self.edges.len() <= other.edges.len()
            && self.edges == other.edges[..self.edges.len()]
    }

    /// Appends one edge at the source end.
    pub fn extended(&self, g: &PresentedGraph, e: EdgeRef) -> Result<Path> {
        let junction = self.source(g)?;
        if g.range(&e)? != junction {
            return Err(Error::JunctionMismatch {
                left: self.to_string(),
                at: junction.to_string(),
                right: e.to_string(),
            });
        }
        let mut edges = self.edges.clone();
        edges.push(e);
        Ok(Path {
            base: self.base.clone(),
            edges,
        })
    }

    /// Checks that every edge of the path exists in `g` and that the path
    /// composes there.
    pub fn check_in(&self, g: &PresentedGraph) -> Result<()> {
        if !g.has_vertex(&self.base) {
            return Err(Error::UnknownVertex(self.base.to_string()));
        }
        if let Some(first) = self.edges.first() {
            if g.range(first)? != self.base {
                return Err(Error::JunctionMismatch {
                    left: self.base.to_string(),
                    at: self.base.to_string(),
                    right: first.to_string(),
                });
            }
        }
        for e in &self.edges {
            if !g.has_edge(e) {
                return Err(Error::UnknownEdge(e.to_string()));
            }
        }
        self.check_composable(g)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            write!(f, "{}", self.base)
        } else {
            let parts: Vec<String> = self.edges.iter().map(|e| e.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Concatenation `μν`, defined when `s(μ) = r(ν)`.
pub fn compose(g: &PresentedGraph, mu: &Path, nu: &Path) -> Result<Path> {
    let junction = mu.source(g)?;
    if *nu.range() != junction {
        return Err(Error::JunctionMismatch {
            left: mu.to_string(),
            at: junction.to_string(),
            right: nu.to_string(),
        });
    }
    let mut edges = mu.edges.clone();
    edges.extend(nu.edges.iter().cloned());
    Ok(Path {
        base: mu.base.clone(),
        edges,
    })
}

/// A finitely described infinite path.
///
/// `Periodic` is `prefix · cycle · cycle · …` with a nonempty cycle looping
/// at `s(prefix)`. `TailAbsorbed` is `prefix` followed by the step edges of
/// `tail`, continuing from wherever the prefix ends (the attach vertex, or a
/// vertex of the tail itself); `first_step` is the index of the first
/// absorbed step edge.
///
/// Both variants are kept canonical: the constructors reduce the cycle to
/// its primitive root and fold the prefix into it, and strip trailing step
/// edges of the absorbed tail from the prefix. Two specs describe the same
/// infinite path iff they are equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InfPathSpec {
    Periodic {
        prefix: Path,
        cycle: Vec<EdgeRef>,
    },
    TailAbsorbed {
        prefix: Path,
        tail: String,
        first_step: u64,
    },
}

impl InfPathSpec {
    /// Eventually periodic spec; validates composability and canonicalizes.
    pub fn periodic(g: &PresentedGraph, prefix: Path, cycle: Vec<EdgeRef>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::BadSpec("empty cycle".into()));
        }
        prefix.check_in(g)?;
        let junction = prefix.source(g)?;
        if g.range(&cycle[0])? != junction {
            return Err(Error::BadSpec(format!(
                "cycle does not start at `{junction}`"
            )));
        }
        for pair in cycle.windows(2) {
            if g.source(&pair[0])? != g.range(&pair[1])? {
                return Err(Error::BadSpec("cycle edges do not compose".into()));
            }
        }
        if g.source(cycle.last().unwrap())? != junction {
            return Err(Error::BadSpec("cycle does not return to its start".into()));
        }
        Ok(Self::periodic_trusted(prefix, cycle))
    }

    /// Canonicalization without the validity checks, for callers whose
    /// inputs are valid by construction.
    pub(crate) fn periodic_trusted(prefix: Path, cycle: Vec<EdgeRef>) -> Self {
        let mut prefix_edges = prefix.edges;
        let mut cycle = cycle;
        for d in 1..=cycle.len() {
            if cycle.len() % d == 0
                && cycle.iter().enumerate().all(|(i, e)| *e == cycle[i % d])
            {
                cycle.truncate(d);
                break;
            }
        }
        while let Some(last) = prefix_edges.last() {
            if *last == cycle[cycle.len() - 1] {
                prefix_edges.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        InfPathSpec::Periodic {
            prefix: Path {
                base: prefix.base,
                edges: prefix_edges,
            },
            cycle,
        }
    }

    /// Spec absorbed by a tail; validates the junction and canonicalizes by
    /// stripping trailing step edges of that tail from the prefix.
    pub fn tail_absorbed(g: &PresentedGraph, prefix: Path, tail: impl Into<String>) -> Result<Self> {
        prefix.check_in(g)?;
        Self::tail_absorbed_trusted(g, prefix, tail)
    }

    /// As [`InfPathSpec::tail_absorbed`] but trusting that the prefix is a
    /// valid path of `g`; the junction is still resolved here.
    pub(crate) fn tail_absorbed_trusted(
        g: &PresentedGraph,
        prefix: Path,
        tail: impl Into<String>,
    ) -> Result<Self> {
        let tail = tail.into();
        let t = g.tail(&tail)?;
        let mut edges = prefix.edges;
        while let Some(EdgeRef::Step { tail: last, .. }) = edges.last() {
            if *last == tail {
                edges.pop();
            } else {
                break;
            }
        }
        let prefix = Path {
            base: prefix.base,
            edges,
        };
        let junction = prefix.source(g)?;
        let first_step = match &junction {
            VertexRef::Core(v) if *v == t.attach => 1,
            VertexRef::Tail { tail: jt, index } if *jt == tail => index + 1,
            other => {
                return Err(Error::BadSpec(format!(
                    "prefix ends at `{other}`, not on tail `{tail}`"
                )))
            }
        };
        Ok(InfPathSpec::TailAbsorbed {
            prefix,
            tail,
            first_step,
        })
    }

    pub fn range(&self) -> &VertexRef {
        match self {
            InfPathSpec::Periodic { prefix, .. } => prefix.range(),
            InfPathSpec::TailAbsorbed { prefix, .. } => prefix.range(),
        }
    }

    pub fn prefix_len(&self) -> u64 {
        match self {
            InfPathSpec::Periodic { prefix, .. } => prefix.len(),
            InfPathSpec::TailAbsorbed { prefix, .. } => prefix.len(),
        }
    }

    /// 1-based edge of the infinite path.
    pub fn edge_at(&self, i: u64) -> EdgeRef {
        debug_assert!(i >= 1);
        match self {
            InfPathSpec::Periodic { prefix, cycle } => {
                let p = prefix.len();
                if i <= p {
                    prefix.edge_at(i).unwrap().clone()
                } else {
                    let k = (i - p - 1) % cycle.len() as u64;
                    cycle[k as usize].clone()
                }
            }
            InfPathSpec::TailAbsorbed {
                prefix,
                tail,
                first_step,
            } => {
                let p = prefix.len();
                if i <= p {
                    prefix.edge_at(i).unwrap().clone()
                } else {
                    EdgeRef::step(tail.clone(), first_step + (i - p - 1))
                }
            }
        }
    }

    /// First `n` edges as a finite path.
    pub fn truncate(&self, n: u64) -> Path {
        Path {
            base: self.range().clone(),
            edges: (1..=n).map(|i| self.edge_at(i)).collect(),
        }
    }

    pub fn starts_with(&self, p: &Path) -> bool {
        self.range() == p.range()
            && p.edges
                .iter()
                .enumerate()
                .all(|(i, e)| self.edge_at(i as u64 + 1) == *e)
    }

    /// Largest `n` such that the two paths agree on their first `n` edges,
    /// capped at `max`.
    pub fn agreement_depth(&self, other: &InfPathSpec, max: u64) -> u64 {
        if self.range() != other.range() {
            return 0;
        }
        for i in 1..=max {
            if self.edge_at(i) != other.edge_at(i) {
                return i - 1;
            }
        }
        max
    }
}

impl fmt::Display for InfPathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfPathSpec::Periodic { prefix, cycle } => {
                let parts: Vec<String> = cycle.iter().map(|e| e.to_string()).collect();
                write!(f, "{prefix}~({})", parts.join("."))
            }
            InfPathSpec::TailAbsorbed { prefix, tail, .. } => write!(f, "{prefix}@{tail}"),
        }
    }
}

/// A boundary path: an infinite path, or a finite path whose source vertex
/// is singular.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryPath {
    Finite(Path),
    Infinite(InfPathSpec),
}

impl BoundaryPath {
    pub fn range(&self) -> &VertexRef {
        match self {
            BoundaryPath::Finite(p) => p.range(),
            BoundaryPath::Infinite(s) => s.range(),
        }
    }

    /// Checks membership in the boundary of `g`.
    pub fn check_in(&self, g: &PresentedGraph) -> Result<()> {
        match self {
            BoundaryPath::Finite(p) => {
                p.check_in(g)?;
                match p.source(g)? {
                    VertexRef::Core(v) if g.singular_vertices().contains(&v) => Ok(()),
                    other => Err(Error::NotBoundary(format!(
                        "finite path ends at non-singular vertex `{other}`"
                    ))),
                }
            }
            BoundaryPath::Infinite(_) => Ok(()),
        }
    }

    /// Edge at 1-based index, `None` past the end of a finite path.
    pub fn edge_at(&self, i: u64) -> Option<EdgeRef> {
        match self {
            BoundaryPath::Finite(p) => p.edge_at(i).cloned(),
            BoundaryPath::Infinite(s) => Some(s.edge_at(i)),
        }
    }

    pub fn starts_with(&self, p: &Path) -> bool {
        match self {
            BoundaryPath::Finite(q) => p.is_prefix_of(q),
            BoundaryPath::Infinite(s) => s.starts_with(p),
        }
    }

    /// `μ · self`, defined when `s(μ)` equals the range of `self`.
    pub fn prepend(&self, g: &PresentedGraph, mu: &Path) -> Result<BoundaryPath> {
        Ok(match self {
            BoundaryPath::Finite(p) => BoundaryPath::Finite(compose(g, mu, p)?),
            BoundaryPath::Infinite(InfPathSpec::Periodic { prefix, cycle }) => {
                BoundaryPath::Infinite(InfPathSpec::periodic(
                    g,
                    compose(g, mu, prefix)?,
                    cycle.clone(),
                )?)
            }
            BoundaryPath::Infinite(InfPathSpec::TailAbsorbed { prefix, tail, .. }) => {
                BoundaryPath::Infinite(InfPathSpec::tail_absorbed(
                    g,
                    compose(g, mu, prefix)?,
                    tail.clone(),
                )?)
            }
        })
    }
}

impl fmt::Display for BoundaryPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPath::Finite(p) => write!(f, "{p}"),
            BoundaryPath::Infinite(s) => write!(f, "{s}"),
        }
    }
}

/// Result of a truncated enumeration. `truncated` reports that items beyond
/// the returned ones were cut off, so downstream consumers never silently
/// miss paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub truncated: bool,
}

/// Whether some path of length exactly `n` starts (range end) at `v`.
fn can_complete(
    g: &PresentedGraph,
    v: &VertexRef,
    n: u64,
    memo: &mut BTreeMap<(VertexRef, u64), bool>,
) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    if let Some(hit) = memo.get(&(v.clone(), n)) {
        return Ok(*hit);
    }
    memo.insert((v.clone(), n), false); // provisional, guards re-entry
    let mut ok = false;
    for e in finite_incoming(g, v)? {
        if can_complete(g, &g.source(&e)?, n - 1, memo)? {
            ok = true;
            break;
        }
    }
    if !ok {
        if let VertexRef::Core(id) = v {
            'fams: for (_, fam) in g.families() {
                if fam.range == *id {
                    for j in 1..=fam.sources.inspection_horizon() {
                        if let Some(src) = fam.sources.at(j) {
                            if can_complete(g, &VertexRef::core(src.clone()), n - 1, memo)? {
                                ok = true;
                                break 'fams;
                            }
                        }
                    }
                }
            }
        }
    }
    memo.insert((v.clone(), n), ok);
    Ok(ok)
}

/// Incoming edges excluding family edges (always finitely many).
fn finite_incoming(g: &PresentedGraph, v: &VertexRef) -> Result<Vec<EdgeRef>> {
    let edges = match g.in_degree(v)? {
        Degree::Finite(n) => g.incoming_edges(v, n as usize)?,
        Degree::Infinite => {
            // Take everything before the first family edge: families come
            // last in canonical order, so request a large finite count and
            // drop the family part.
            let mut k = 4;
            let mut all;
            loop {
                all = g.incoming_edges(v, k)?;
                if all.len() < k {
                    break;
                }
                if all.iter().any(|e| matches!(e, EdgeRef::Family { .. })) {
                    break;
                }
                k *= 2;
            }
            all.retain(|e| !matches!(e, EdgeRef::Family { .. }));
            all
        }
    };
    Ok(edges)
}

/// Positions of a family pattern worth extending into, given that the
/// continuation must still complete `remaining` more edges.
enum FamilyPositions {
    Finite(Vec<u64>),
    /// Prefix hits, then every position of the cycle whose source can
    /// complete, recurring with the cycle period forever.
    Infinite {
        prefix_hits: Vec<u64>,
        cycle_hits: Vec<u64>,
        prefix_len: u64,
        period: u64,
    },
}

impl FamilyPositions {
    fn iter(&self) -> FamilyPositionIter<'_> {
        FamilyPositionIter {
            positions: self,
            at: 0,
            turn: 0,
        }
    }
}

struct FamilyPositionIter<'a> {
    positions: &'a FamilyPositions,
    at: usize,
    turn: u64,
}

impl Iterator for FamilyPositionIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match self.positions {
            FamilyPositions::Finite(v) => {
                let item = v.get(self.at).copied();
                self.at += 1;
                item
            }
            FamilyPositions::Infinite {
                prefix_hits,
                cycle_hits,
                prefix_len,
                period,
            } => {
                if self.at < prefix_hits.len() {
                    let item = prefix_hits[self.at];
                    self.at += 1;
                    return Some(item);
                }
                if cycle_hits.is_empty() {
                    return None;
                }
                let i = self.at - prefix_hits.len();
                let item = prefix_len + self.turn * period + cycle_hits[i];
                if i + 1 == cycle_hits.len() {
                    self.at = prefix_hits.len();
                    self.turn += 1;
                } else {
                    self.at += 1;
                }
                Some(item)
            }
        }
    }
}

fn family_positions(
    g: &PresentedGraph,
    sources: &EpSeq<String>,
    remaining: u64,
    memo: &mut BTreeMap<(VertexRef, u64), bool>,
) -> Result<FamilyPositions> {
    match sources {
        EpSeq::FiniteSupport(map) => {
            let mut hits = Vec::new();
            for (j, src) in map {
                if can_complete(g, &VertexRef::core(src.clone()), remaining, memo)? {
                    hits.push(*j);
                }
            }
            Ok(FamilyPositions::Finite(hits))
        }
        EpSeq::Periodic { prefix, cycle } => {
            let mut prefix_hits = Vec::new();
            for (i, src) in prefix.iter().enumerate() {
                if can_complete(g, &VertexRef::core(src.clone()), remaining, memo)? {
                    prefix_hits.push(i as u64 + 1);
                }
            }
            let mut cycle_hits = Vec::new();
            for (i, src) in cycle.iter().enumerate() {
                if can_complete(g, &VertexRef::core(src.clone()), remaining, memo)? {
                    cycle_hits.push(i as u64 + 1);
                }
            }
            if cycle_hits.is_empty() {
                Ok(FamilyPositions::Finite(prefix_hits))
            } else {
                Ok(FamilyPositions::Infinite {
                    prefix_hits,
                    cycle_hits,
                    prefix_len: prefix.len() as u64,
                    period: cycle.len() as u64,
                })
            }
        }
    }
}

/// Paths of length exactly `n` with range `v`, in canonical order, truncated
/// at `limit` items.
pub fn paths_with_range(
    g: &PresentedGraph,
    v: &VertexRef,
    n: u64,
    limit: usize,
) -> Result<Enumeration<Path>> {
    if !g.has_vertex(v) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let mut items = Vec::new();
    let mut truncated = false;
    let mut memo = BTreeMap::new();
    extend_exact(
        g,
        Path::at(v.clone()),
        n,
        limit,
        &mut items,
        &mut truncated,
        &mut memo,
    )?;
    Ok(Enumeration { items, truncated })
}

fn extend_exact(
    g: &PresentedGraph,
    current: Path,
    remaining: u64,
    limit: usize,
    items: &mut Vec<Path>,
    truncated: &mut bool,
    memo: &mut BTreeMap<(VertexRef, u64), bool>,
) -> Result<()> {
    if items.len() >= limit {
        *truncated = true;
        return Ok(());
    }
    if remaining == 0 {
        items.push(current);
        return Ok(());
    }
    let at = current.source(g)?;
    for e in finite_incoming(g, &at)? {
        if can_complete(g, &g.source(&e)?, remaining - 1, memo)? {
            extend_exact(
                g,
                current.extended(g, e)?,
                remaining - 1,
                limit,
                items,
                truncated,
                memo,
            )?;
            if items.len() >= limit {
                *truncated = true;
                return Ok(());
            }
        }
    }
    if let VertexRef::Core(id) = &at {
        for (fid, fam) in g.families() {
            if fam.range != *id {
                continue;
            }
            let positions = family_positions(g, &fam.sources, remaining - 1, memo)?;
            for j in positions.iter() {
                if items.len() >= limit {
                    *truncated = true;
                    return Ok(());
                }
                extend_exact(
                    g,
                    current.extended(g, EdgeRef::family(fid.clone(), j))?,
                    remaining - 1,
                    limit,
                    items,
                    truncated,
                    memo,
                )?;
            }
        }
    }
    Ok(())
}

/// The set `vE^{≤n}`: paths of length `n` with range `v`, together with
/// shorter paths whose source receives no edges. `Infinite` is reported when
/// an infinite receiver is reachable strictly before depth `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ELeqN {
    Finite(Vec<Path>),
    Infinite,
}

pub fn e_leq_n(g: &PresentedGraph, v: &VertexRef, n: u64) -> Result<ELeqN> {
    if !g.has_vertex(v) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let mut items = Vec::new();
    let finite = collect_leq(g, Path::at(v.clone()), n, &mut items)?;
    if finite {
        Ok(ELeqN::Finite(items))
    } else {
        Ok(ELeqN::Infinite)
    }
}

fn collect_leq(
    g: &PresentedGraph,
    current: Path,
    remaining: u64,
    items: &mut Vec<Path>,
) -> Result<bool> {
    if remaining == 0 {
        items.push(current);
        return Ok(true);
    }
    let at = current.source(g)?;
    match g.in_degree(&at)? {
        Degree::Infinite => Ok(false),
        Degree::Finite(0) => {
            items.push(current);
            Ok(true)
        }
        Degree::Finite(k) => {
            for e in g.incoming_edges(&at, k as usize)? {
                if !collect_leq(g, current.extended(g, e)?, remaining - 1, items)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Exhaustive prefix enumeration for oracles: all paths of length at most
/// `max_len` with range `v`, with family indices capped at `family_cap`.
pub fn enumerate_paths_capped(
    g: &PresentedGraph,
    v: &VertexRef,
    max_len: u64,
    family_cap: u64,
) -> Result<Vec<Path>> {
    Ok(enumerate_paths_budgeted(g, v, max_len, family_cap, usize::MAX)?.items)
}

/// Like [`enumerate_paths_capped`], but stops after `max_nodes` paths and
/// reports the truncation.
pub fn enumerate_paths_budgeted(
    g: &PresentedGraph,
    v: &VertexRef,
    max_len: u64,
    family_cap: u64,
    max_nodes: usize,
) -> Result<Enumeration<Path>> {
    let mut out = Vec::new();
    let mut truncated = false;
    let mut stack = vec![Path::at(v.clone())];
    while let Some(p) = stack.pop() {
        if out.len() >= max_nodes {
            truncated = true;
            break;
        }
        if p.len() < max_len {
            let at = p.source(g)?;
            for e in finite_incoming(g, &at)? {
                stack.push(p.extended(g, e)?);
            }
            if let VertexRef::Core(id) = &at {
                for (fid, fam) in g.families() {
                    if fam.range == *id {
                        for j in 1..=family_cap {
                            if fam.sources.at(j).is_some() {
                                stack.push(p.extended(g, EdgeRef::family(fid.clone(), j))?);
                            }
                        }
                    }
                }
            }
        }
        out.push(p);
    }
    out.sort();
    Ok(Enumeration {
        items: out,
        truncated,
    })
}

/// Boundary path representatives at `v`: finite boundary paths of length at
/// most `depth`, plus canonical infinite specs whose prefix and cycle fit
/// within `depth`. Family branching makes the full set infinite, in which
/// case `truncated` is set.
pub fn boundary_paths(
    g: &PresentedGraph,
    v: &VertexRef,
    depth: u64,
    limit: usize,
) -> Result<Enumeration<BoundaryPath>> {
    // Beyond a few indices, family edges behave identically; a small cap
    // keeps representative sets representative without blowing up, and the
    // node budget bounds pathological branching. Both set the truncation
    // flag when they bite.
    let family_cap = (limit as u64).min(depth.max(3) + 1);
    let budget = 4_000usize.max(16 * limit);
    let singular = g.singular_vertices();
    let prefixes = enumerate_paths_budgeted(g, v, depth, family_cap, budget)?;
    let mut set: BTreeSet<BoundaryPath> = BTreeSet::new();
    // Any expandable infinite receiver makes the full listing infinite.
    let mut truncated = prefixes.truncated
        || prefixes.items.iter().any(|p| {
            p.len() < depth
                && matches!(p.source(g), Ok(VertexRef::Core(ref c)) if g.families().any(|(_, f)| f.range == *c))
        });
    // Cycles depend only on the end vertex and the remaining length.
    let mut cycles: BTreeMap<(VertexRef, u64), Vec<Path>> = BTreeMap::new();
    for p in &prefixes.items {
        let src = p.source(g)?;
        match &src {
            VertexRef::Core(c) => {
                if singular.contains(c) {
                    set.insert(BoundaryPath::Finite(p.clone()));
                }
                for (tid, tail) in g.tails() {
                    if tail.attach == *c {
                        set.insert(BoundaryPath::Infinite(InfPathSpec::tail_absorbed_trusted(
                            g,
                            p.clone(),
                            tid.clone(),
                        )?));
                    }
                }
            }
            VertexRef::Tail { tail, .. } => {
                set.insert(BoundaryPath::Infinite(InfPathSpec::tail_absorbed_trusted(
                    g,
                    p.clone(),
                    tail.clone(),
                )?));
            }
        }
        for cycle_len in 1..=depth.saturating_sub(p.len()) {
            let key = (src.clone(), cycle_len);
            if !cycles.contains_key(&key) {
                let candidates = paths_with_range(g, &src, cycle_len, limit)?;
                truncated |= candidates.truncated;
                let mut loops = Vec::new();
                for c in candidates.items {
                    if c.source(g)? == src {
                        loops.push(c);
                    }
                }
                cycles.insert(key.clone(), loops);
            }
            for c in &cycles[&key] {
                set.insert(BoundaryPath::Infinite(InfPathSpec::periodic_trusted(
                    p.clone(),
                    c.edges().to_vec(),
                )));
            }
        }
    }
    let mut items: Vec<BoundaryPath> = set.into_iter().collect();
    if items.len() > limit {
        items.truncate(limit);
        truncated = true;
    }
    Ok(Enumeration { items, truncated })
}

/// The minimal common extension of `μ` and `ν`: the longer path when one is
/// a prefix of the other, `None` otherwise.
pub fn common_extension(mu: &Path, nu: &Path) -> Result<Option<Path>> {
    if mu.range() != nu.range() {
        return Err(Error::RangeMismatch(
            mu.range().to_string(),
            nu.range().to_string(),
        ));
    }
    if mu.is_prefix_of(nu) {
        Ok(Some(nu.clone()))
    } else if nu.is_prefix_of(mu) {
        Ok(Some(mu.clone()))
    } else {
        Ok(None)
    }
}

/// Whether the finite set `F ⊂ vE^*` is exhaustive at `v`: every path with
/// range `v` has a common extension with some member of `F`.
///
/// The decision walks the prefix tree spanned by `F`. A node covered by a
/// member prunes; at an uncovered node every edge must be used by a strict
/// extender, which makes the answer `false` as soon as an unused edge or an
/// infinite receiver shows up.
pub fn is_exhaustive(g: &PresentedGraph, v: &VertexRef, fset: &[Path]) -> Result<bool> {
    for f in fset {
        if f.range() != v {
            return Err(Error::Precondition(format!(
                "path `{f}` does not have range `{v}`"
            )));
        }
    }
    if fset.is_empty() {
        return Ok(false);
    }
    exhaustive_at(g, &Path::at(v.clone()), fset)
}

fn exhaustive_at(g: &PresentedGraph, mu: &Path, fset: &[Path]) -> Result<bool> {
    if fset.iter().any(|f| f.is_prefix_of(mu)) {
        return Ok(true);
    }
    let extenders: Vec<&Path> = fset.iter().filter(|f| mu.is_prefix_of(f)).collect();
    if extenders.is_empty() {
        return Ok(false);
    }
    let at = mu.source(g)?;
    match g.in_degree(&at)? {
        Degree::Infinite => Ok(false),
        Degree::Finite(k) => {
            let used: BTreeSet<&EdgeRef> = extenders
                .iter()
                .filter_map(|f| f.edge_at(mu.len() + 1))
                .collect();
            for e in g.incoming_edges(&at, k as usize)? {
                if !used.contains(&e) {
                    return Ok(false);
                }
                if !exhaustive_at(g, &mu.extended(g, e)?, fset)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// A deterministic boundary path with range `v`: the vertex itself if it is
/// singular, otherwise follow the canonically first incoming edge, stopping
/// at singular vertices, absorbing into the first tail encountered, or
/// looping at the first revisited vertex.
pub fn extend_to_boundary(g: &PresentedGraph, v: &VertexRef) -> Result<BoundaryPath> {
    let singular = g.singular_vertices();
    let mut path = Path::at(v.clone());
    let mut visited: BTreeMap<VertexRef, u64> = BTreeMap::new();
    loop {
        let at = path.source(g)?;
        if let VertexRef::Core(c) = &at {
            if singular.contains(c) {
                return Ok(BoundaryPath::Finite(path));
            }
        }
        if let Some(first_seen) = visited.get(&at) {
            let cycle = path.edges()[*first_seen as usize..].to_vec();
            return Ok(BoundaryPath::Infinite(InfPathSpec::periodic(
                g,
                path.prefix(*first_seen),
                cycle,
            )?));
        }
        visited.insert(at.clone(), path.len());
        let next = g
            .incoming_edges(&at, 1)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Internal(format!("non-singular vertex `{at}` has no edges")))?;
        if let EdgeRef::Step { tail, .. } = &next {
            return Ok(BoundaryPath::Infinite(InfPathSpec::tail_absorbed(
                g,
                path,
                tail.clone(),
            )?));
        }
        path = path.extended(g, next)?;
    }
}

/// A boundary path extending `v` that avoids every nonempty continuation in
/// `forbidden` (given as edge sequences hanging off `v`). Returns `None`
/// when every boundary path through `v` meets one of them.
pub fn boundary_avoiding(
    g: &PresentedGraph,
    v: &VertexRef,
    forbidden: &[Vec<EdgeRef>],
) -> Result<Option<BoundaryPath>> {
    if forbidden.iter().any(|p| p.is_empty()) {
        return Ok(None);
    }
    if forbidden.is_empty() {
        return Ok(Some(extend_to_boundary(g, v)?));
    }
    match (v, g.in_degree(v)?) {
        (VertexRef::Core(c), Degree::Finite(0)) => {
            debug_assert!(g.singular_vertices().contains(c));
            Ok(Some(BoundaryPath::Finite(Path::at(v.clone()))))
        }
        (VertexRef::Core(_), Degree::Infinite) => {
            // Finitely many forbidden first edges against infinitely many
            // incoming edges: pick a family index past every mention.
            let mut max_index: BTreeMap<&str, u64> = BTreeMap::new();
            for p in forbidden {
                if let EdgeRef::Family { family, index } = &p[0] {
                    let m = max_index.entry(family.as_str()).or_insert(0);
                    *m = (*m).max(*index);
                }
            }
            let (fid, _) = g
                .families()
                .find(|(_, f)| VertexRef::core(f.range.clone()) == *v)
                .ok_or_else(|| Error::Internal("infinite receiver without family".into()))?;
            let fresh = max_index.get(fid.as_str()).copied().unwrap_or(0) + 1;
            let e = EdgeRef::family(fid.clone(), fresh);
            let rest = extend_to_boundary(g, &g.source(&e)?)?;
            let stem = Path::at(v.clone()).extended(g, e)?;
            Ok(Some(rest.prepend(g, &stem)?))
        }
        (VertexRef::Tail { .. }, Degree::Infinite) => Err(Error::Internal(
            "tail vertices always have finite in-degree".into(),
        )),
        (_, Degree::Finite(k)) => {
            for e in g.incoming_edges(v, k as usize)? {
                if forbidden.iter().any(|p| p.len() == 1 && p[0] == e) {
                    continue;
                }
                let survivors: Vec<Vec<EdgeRef>> = forbidden
                    .iter()
                    .filter(|p| p[0] == e)
                    .map(|p| p[1..].to_vec())
                    .collect();
                if let Some(rest) = boundary_avoiding(g, &g.source(&e)?, &survivors)? {
                    let stem = Path::at(v.clone()).extended(g, e.clone())?;
                    return Ok(Some(rest.prepend(g, &stem)?));
                }
            }
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn core(v: &str) -> VertexRef {
        VertexRef::core(v)
    }

    fn path(g: &PresentedGraph, edges: &[EdgeRef]) -> Path {
        Path::from_edges(g, edges.to_vec()).unwrap()
    }

    #[test]
    fn compose_identity_and_junctions() {
        let g = fixtures::e_ex();
        let nu1 = path(&g, &[EdgeRef::core("nu1")]);
        let at_v = Path::at(core("v"));
        assert_eq!(compose(&g, &at_v, &nu1).unwrap(), nu1);
        let gg = path(&g, &[EdgeRef::core("g")]);
        let nu1g = compose(&g, &nu1, &gg).unwrap();
        assert_eq!(nu1g.len(), 2);
        assert!(compose(&g, &nu1, &nu1).is_err());
    }

    #[test]
    fn compose_is_associative_where_defined() {
        let g = fixtures::e_ex();
        let a = path(&g, &[EdgeRef::core("nu1")]);
        let b = path(&g, &[EdgeRef::core("g")]);
        let c = path(&g, &[EdgeRef::core("f")]);
        let left = compose(&g, &compose(&g, &a, &b).unwrap(), &c).unwrap();
        let right = compose(&g, &a, &compose(&g, &b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn paths_with_range_examples() {
        let g = fixtures::e_ex();
        let out = paths_with_range(&g, &core("v"), 2, 100).unwrap();
        assert!(!out.truncated);
        let shown: Vec<String> = out.items.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["nu1.g", "nu1.nu2"]);

        let g = fixtures::e_omega();
        let out = paths_with_range(&g, &core("v"), 1, 3).unwrap();
        assert!(out.truncated);
        let shown: Vec<String> = out.items.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["e[1]", "e[2]", "e[3]"]);

        let g = fixtures::e_pt();
        let out = paths_with_range(&g, &core("v"), 1, 10).unwrap();
        assert!(out.items.is_empty() && !out.truncated);
    }

    #[test]
    fn e_leq_n_examples() {
        let g = fixtures::e_ex();
        match e_leq_n(&g, &core("v"), 3).unwrap() {
            ELeqN::Finite(items) => {
                let shown: Vec<String> = items.iter().map(|p| p.to_string()).collect();
                assert_eq!(shown, vec!["nu1.g.f", "nu1.nu2"]);
            }
            ELeqN::Infinite => panic!("expected finite"),
        }

        let g = fixtures::e_omega();
        match e_leq_n(&g, &core("w"), 1).unwrap() {
            ELeqN::Finite(items) => {
                assert_eq!(items, vec![Path::at(core("w"))]);
            }
            ELeqN::Infinite => panic!("expected finite"),
        }
        assert_eq!(e_leq_n(&g, &core("v"), 1).unwrap(), ELeqN::Infinite);

        let g = fixtures::e_pt();
        match e_leq_n(&g, &core("v"), 5).unwrap() {
            ELeqN::Finite(items) => assert_eq!(items, vec![Path::at(core("v"))]),
            ELeqN::Infinite => panic!("expected finite"),
        }
    }

    #[test]
    fn boundary_path_examples() {
        let g = fixtures::e_omega();
        let out = boundary_paths(&g, &core("v"), 2, 6).unwrap();
        assert!(out.truncated);
        assert!(out
            .items
            .contains(&BoundaryPath::Finite(Path::at(core("v")))));
        assert!(out.items.contains(&BoundaryPath::Finite(path(
            &g,
            &[EdgeRef::family("e", 1)]
        ))));
        assert!(out.items.contains(&BoundaryPath::Finite(path(
            &g,
            &[EdgeRef::family("e", 2)]
        ))));

        let g = fixtures::e_ex();
        let out = boundary_paths(&g, &core("v"), 4, 100).unwrap();
        assert!(!out.truncated);
        let shown: Vec<String> = out.items.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["nu1.nu2", "v~(nu1.g.f)"]);

        let g = fixtures::e_pt();
        let out = boundary_paths(&g, &core("v"), 1, 10).unwrap();
        assert_eq!(out.items, vec![BoundaryPath::Finite(Path::at(core("v")))]);
    }

    #[test]
    fn row_finite_sourceless_graphs_have_infinite_boundary_only() {
        let g = fixtures::f_ex();
        for v in ["v", "u", "w", "b"] {
            let out = boundary_paths(&g, &core(v), 4, 200).unwrap();
            assert!(!out.items.is_empty());
            for item in out.items {
                assert!(matches!(item, BoundaryPath::Infinite(_)), "{item}");
            }
        }
    }

    #[test]
    fn common_extension_examples() {
        let g = fixtures::e_ex();
        let nu1 = path(&g, &[EdgeRef::core("nu1")]);
        let nu1g = path(&g, &[EdgeRef::core("nu1"), EdgeRef::core("g")]);
        let nu1nu2 = path(&g, &[EdgeRef::core("nu1"), EdgeRef::core("nu2")]);
        assert_eq!(common_extension(&nu1, &nu1g).unwrap(), Some(nu1g.clone()));
        assert_eq!(common_extension(&nu1nu2, &nu1g).unwrap(), None);
        assert_eq!(
            common_extension(&Path::at(core("v")), &nu1).unwrap(),
            Some(nu1)
        );
    }

    #[test]
    fn exhaustive_examples() {
        let g = fixtures::e_ex();
        let nu1 = path(&g, &[EdgeRef::core("nu1")]);
        assert!(is_exhaustive(&g, &core("v"), &[nu1]).unwrap());
        assert!(is_exhaustive(&g, &core("v"), &[Path::at(core("v"))]).unwrap());

        let g = fixtures::e_omega();
        let e1 = path(&g, &[EdgeRef::family("e", 1)]);
        let e2 = path(&g, &[EdgeRef::family("e", 2)]);
        assert!(!is_exhaustive(&g, &core("v"), &[e1, e2]).unwrap());
    }

    #[test]
    fn e_leq_n_is_exhaustive_when_finite() {
        for g in [fixtures::e_pt(), fixtures::e_ex(), fixtures::f_ex()] {
            for v in g.core_vertices() {
                for n in 0..=3 {
                    if let ELeqN::Finite(items) = e_leq_n(&g, &core(v), n).unwrap() {
                        assert!(
                            is_exhaustive(&g, &core(v), &items).unwrap(),
                            "vE^{{≤{n}}} at {v} should be exhaustive"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn spec_canonicalization() {
        let g = fixtures::e_ex();
        let cyc = vec![EdgeRef::core("nu1"), EdgeRef::core("g"), EdgeRef::core("f")];
        let a = InfPathSpec::periodic(&g, Path::at(core("v")), cyc.clone()).unwrap();
        // Same infinite path presented with a rolled prefix.
        let b = InfPathSpec::periodic(
            &g,
            path(&g, &[EdgeRef::core("nu1")]),
            vec![EdgeRef::core("g"), EdgeRef::core("f"), EdgeRef::core("nu1")],
        )
        .unwrap();
        assert_eq!(a, b);
        // Doubled cycle reduces to the primitive root.
        let doubled: Vec<EdgeRef> = cyc.iter().chain(cyc.iter()).cloned().collect();
        let c = InfPathSpec::periodic(&g, Path::at(core("v")), doubled).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn tail_absorbed_strips_redundant_steps() {
        let g = fixtures::f_ex();
        let raw = path(&g, &[EdgeRef::step("nu", 1), EdgeRef::step("nu", 2)]);
        let spec = InfPathSpec::tail_absorbed(&g, raw, "nu").unwrap();
        assert_eq!(
            spec,
            InfPathSpec::tail_absorbed(&g, Path::at(core("w")), "nu").unwrap()
        );
        assert_eq!(spec.edge_at(1), EdgeRef::step("nu", 1));
        assert_eq!(spec.edge_at(3), EdgeRef::step("nu", 3));
    }

    #[test]
    fn boundary_avoiding_picks_fresh_family_edges() {
        let g = fixtures::e_omega();
        let forbidden = vec![vec![EdgeRef::family("e", 1)], vec![EdgeRef::family("e", 2)]];
        let found = boundary_avoiding(&g, &core("v"), &forbidden)
            .unwrap()
            .unwrap();
        assert_eq!(found.edge_at(1), Some(EdgeRef::family("e", 3)));
    }
}
