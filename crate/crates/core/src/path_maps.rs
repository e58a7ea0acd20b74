//! The path correspondence between a graph and its collapse.
//!
//! Collapsing tails replaces each divergent initial segment
//! `t#1 … t#k · entry` by a single family edge, and leaves every other edge
//! alone. Paths of the original graph that start and end at surviving
//! vertices therefore factor uniquely into *segments* — plain shared edges
//! and collapsed pieces — and mapping segments to their replacement edges
//! gives bijections on finite paths and on boundary paths. Both directions
//! of the induced homeomorphism of path spaces are witnessed constructively
//! by [`open_image_witness`] and [`open_preimage_witness`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cylinder::{member, CylinderBasic, Point};
use crate::error::{Error, Result};
use crate::graph::{EdgeRef, PresentedGraph, VertexRef};
use crate::path::{BoundaryPath, InfPathSpec, Path};
use crate::seq::EpSeq;

/// The recorded correspondence of one collapse: the original graph, the
/// collapsed graph, and for each collapsed tail the generated family (or
/// nothing for an entry-free tail).
#[derive(Clone, Debug)]
pub struct CollapseMap {
    original: PresentedGraph,
    collapsed: PresentedGraph,
    tails: BTreeMap<String, Option<String>>,
    family_to_tail: BTreeMap<String, String>,
}

impl CollapseMap {
    pub(crate) fn new(
        original: PresentedGraph,
        collapsed: PresentedGraph,
        tails: BTreeMap<String, Option<String>>,
    ) -> Self {
        let family_to_tail = tails
            .iter()
            .filter_map(|(t, f)| f.as_ref().map(|f| (f.clone(), t.clone())))
            .collect();
        CollapseMap {
            original,
            collapsed,
            tails,
            family_to_tail,
        }
    }

    pub fn original(&self) -> &PresentedGraph {
        &self.original
    }

    pub fn collapsed(&self) -> &PresentedGraph {
        &self.collapsed
    }

    pub fn collapsed_tails(&self) -> impl Iterator<Item = &String> {
        self.tails.keys()
    }

    pub fn is_collapsed_tail(&self, tail: &str) -> bool {
        self.tails.contains_key(tail)
    }

    pub fn family_for_tail(&self, tail: &str) -> Option<&String> {
        self.tails.get(tail).and_then(|f| f.as_ref())
    }

    pub fn tail_for_family(&self, family: &str) -> Option<&String> {
        self.family_to_tail.get(family)
    }

    pub fn collapsed_tail_at(&self, attach: &str) -> Option<&String> {
        self.tails.keys().find(|t| {
            self.original
                .tail(t)
                .map(|tail| tail.attach == attach)
                .unwrap_or(false)
        })
    }

    /// Whether a vertex of the original graph survives the collapse.
    pub fn survives(&self, v: &VertexRef) -> bool {
        match v {
            VertexRef::Core(_) => true,
            VertexRef::Tail { tail, .. } => !self.is_collapsed_tail(tail),
        }
    }

    /// Schedule entry `(position, label)` behind the `index`-th edge of a
    /// generated family.
    pub fn entry_for_index(&self, tail: &str, index: u64) -> Result<(u64, String)> {
        let schedule = &self.original.tail(tail)?.schedule;
        let EpSeq::Periodic { prefix, cycle } = schedule else {
            return Err(Error::Internal(format!(
                "tail `{tail}` generated a family from a finite schedule"
            )));
        };
        let per_prefix: u64 = prefix.iter().map(|s| s.len() as u64).sum();
        let per_cycle: u64 = cycle.iter().map(|s| s.len() as u64).sum();
        if index == 0 {
            return Err(Error::UnknownEdge(format!("{tail}[0]")));
        }
        if index <= per_prefix {
            let mut left = index;
            for (i, slot) in prefix.iter().enumerate() {
                if left <= slot.len() as u64 {
                    return Ok((i as u64 + 1, slot[left as usize - 1].label.clone()));
                }
                left -= slot.len() as u64;
            }
            unreachable!()
        }
        let m = index - per_prefix - 1; // 0-based among cycle entries
        let turn = m / per_cycle;
        let mut left = m % per_cycle + 1;
        for (i, slot) in cycle.iter().enumerate() {
            if left <= slot.len() as u64 {
                let position = prefix.len() as u64 + turn * cycle.len() as u64 + i as u64 + 1;
                return Ok((position, slot[left as usize - 1].label.clone()));
            }
            left -= slot.len() as u64;
        }
        unreachable!()
    }

    /// Family index of the entry `(position, label)` of a collapsed tail.
    pub fn index_for_entry(&self, tail: &str, position: u64, label: &str) -> Result<u64> {
        let schedule = &self.original.tail(tail)?.schedule;
        let EpSeq::Periodic { prefix, cycle } = schedule else {
            return Err(Error::Internal(format!(
                "tail `{tail}` generated a family from a finite schedule"
            )));
        };
        let per_cycle: u64 = cycle.iter().map(|s| s.len() as u64).sum();
        let offset_in_slot = |slot: &[crate::graph::Entry]| -> Result<u64> {
            slot.iter()
                .position(|e| e.label == label)
                .map(|i| i as u64)
                .ok_or_else(|| Error::UnknownEdge(format!("{label}[{position}]")))
        };
        if position == 0 {
            return Err(Error::UnknownEdge(format!("{label}[0]")));
        }
        if position <= prefix.len() as u64 {
            let mut acc = 0u64;
            for slot in &prefix[..position as usize - 1] {
                acc += slot.len() as u64;
            }
            return Ok(acc + offset_in_slot(&prefix[position as usize - 1])? + 1);
        }
        let per_prefix: u64 = prefix.iter().map(|s| s.len() as u64).sum();
        let m = position - prefix.len() as u64 - 1; // 0-based cycle position
        let turn = m / cycle.len() as u64;
        let k = (m % cycle.len() as u64) as usize;
        let mut acc = per_prefix + turn * per_cycle;
        for slot in &cycle[..k] {
            acc += slot.len() as u64;
        }
        Ok(acc + offset_in_slot(&cycle[k])? + 1)
    }
}

/// One factor of a path of the original graph: either an edge shared with
/// the collapsed graph, or a divergent initial segment of a collapsed tail —
/// `depth` step edges followed by the entry `label` at that position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Segment {
    Plain(EdgeRef),
    Piece {
        tail: String,
        depth: u64,
        label: String,
    },
}

impl Segment {
    /// Length in edges of the original graph.
    pub fn len(&self) -> u64 {
        match self {
            Segment::Plain(_) => 1,
            Segment::Piece { depth, .. } => depth + 1,
        }
    }

    /// The edges of the original graph making up this segment.
    pub fn edges(&self) -> Vec<EdgeRef> {
        match self {
            Segment::Plain(e) => vec![e.clone()],
            Segment::Piece { tail, depth, label } => {
                let mut edges: Vec<EdgeRef> =
                    (1..=*depth).map(|i| EdgeRef::step(tail.clone(), i)).collect();
                edges.push(EdgeRef::entry(tail.clone(), *depth, label.clone()));
                edges
            }
        }
    }

    /// The single edge of the collapsed graph this segment maps to.
    pub fn image_edge(&self, m: &CollapseMap) -> Result<EdgeRef> {
        match self {
            Segment::Plain(e) => Ok(e.clone()),
            Segment::Piece { tail, depth, label } => {
                let family = m.family_for_tail(tail).ok_or_else(|| {
                    Error::Internal(format!("collapsed tail `{tail}` has no family"))
                })?;
                let index = m.index_for_entry(tail, *depth, label)?;
                Ok(EdgeRef::family(family.clone(), index))
            }
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Plain(e) => write!(f, "{e}"),
            Segment::Piece { tail, depth, label } => {
                write!(f, "{tail}#1..{depth}·{label}[{depth}]")
            }
        }
    }
}

/// Factorization of an infinite path: finitely many leading segments, then
/// how the remainder behaves.
#[derive(Clone, Debug)]
pub struct SpecFactorization {
    pub prefix: Vec<Segment>,
    pub rest: SpecRest,
}

#[derive(Clone, Debug)]
pub enum SpecRest {
    /// The remainder is exactly a collapsed tail; the path maps to a finite
    /// boundary path.
    Absorbed(String),
    /// The segmentation is eventually periodic with this nonempty cycle.
    Cycle(Vec<Segment>),
    /// The remainder follows a surviving tail, whose step edges are plain.
    Foreign { tail: String, first_step: u64 },
}

/// Cursor used to parse one segment at a time.
struct SegmentReader<'a> {
    m: &'a CollapseMap,
}

enum EdgeAt {
    Edge(EdgeRef),
    End,
}

impl SegmentReader<'_> {
    /// Parses one segment starting at 1-based index `i`. Returns the segment
    /// and the index just past it, or `None` when the stream ends exactly at
    /// `i`, or an error when the stream ends inside a collapsed tail.
    fn parse(
        &self,
        at: &dyn Fn(u64) -> EdgeAt,
        i: u64,
        guard: u64,
    ) -> Result<Option<(Segment, u64)>> {
        let first = match at(i) {
            EdgeAt::End => return Ok(None),
            EdgeAt::Edge(e) => e,
        };
        match &first {
            EdgeRef::Step { tail, index } if self.m.is_collapsed_tail(tail) => {
                if *index != 1 {
                    return Err(Error::Internal(format!(
                        "segment starts inside collapsed tail `{tail}` at step {index}"
                    )));
                }
                let mut depth = 1u64;
                loop {
                    if depth > guard {
                        return Err(Error::Internal(
                            "collapsed-tail walk exceeded its bound".into(),
                        ));
                    }
                    match at(i + depth) {
                        EdgeAt::End => return Err(Error::EndsMidTail),
                        EdgeAt::Edge(EdgeRef::Step {
                            tail: t2,
                            index: i2,
                        }) if t2 == *tail && i2 == depth + 1 => depth += 1,
                        EdgeAt::Edge(EdgeRef::Entry {
                            tail: t2,
                            position,
                            label,
                        }) if t2 == *tail && position == depth => {
                            return Ok(Some((
                                Segment::Piece {
                                    tail: tail.clone(),
                                    depth,
                                    label,
                                },
                                i + depth + 1,
                            )));
                        }
                        EdgeAt::Edge(other) => {
                            return Err(Error::Internal(format!(
                                "edge {other} does not continue collapsed tail `{tail}`"
                            )))
                        }
                    }
                }
            }
            EdgeRef::Entry { tail, .. } if self.m.is_collapsed_tail(tail) => {
                Err(Error::Internal(format!(
                    "segment starts with an entry of collapsed tail `{tail}`"
                )))
            }
            _ => Ok(Some((Segment::Plain(first), i + 1))),
        }
    }
}

/// Factors a finite path into segments. The range must survive the
/// collapse; paths ending strictly inside a collapsed tail are rejected.
pub fn factorize_path(m: &CollapseMap, path: &Path) -> Result<Vec<Segment>> {
    if !m.survives(path.range()) {
        return Err(Error::RangeNotSurviving(path.range().to_string()));
    }
    let reader = SegmentReader { m };
    let edges = path.edges();
    let at = |i: u64| -> EdgeAt {
        match edges.get(i as usize - 1) {
            Some(e) => EdgeAt::Edge(e.clone()),
            None => EdgeAt::End,
        }
    };
    let mut segments = Vec::new();
    let mut i = 1u64;
    while let Some((seg, next)) = reader.parse(&at, i, path.len() + 1)? {
        segments.push(seg);
        i = next;
    }
    Ok(segments)
}

/// Factors a represented infinite path.
pub fn factorize_spec(m: &CollapseMap, spec: &InfPathSpec) -> Result<SpecFactorization> {
    if !m.survives(spec.range()) {
        return Err(Error::RangeNotSurviving(spec.range().to_string()));
    }
    let reader = SegmentReader { m };
    match spec {
        InfPathSpec::TailAbsorbed {
            prefix,
            tail,
            first_step,
        } => {
            let segments = factorize_path(m, prefix)?;
            if m.is_collapsed_tail(tail) {
                // Canonical specs reach a collapsed tail at its attach
                // vertex; a mid-tail start would not survive the collapse.
                debug_assert_eq!(*first_step, 1);
                Ok(SpecFactorization {
                    prefix: segments,
                    rest: SpecRest::Absorbed(tail.clone()),
                })
            } else {
                Ok(SpecFactorization {
                    prefix: segments,
                    rest: SpecRest::Foreign {
                        tail: tail.clone(),
                        first_step: *first_step,
                    },
                })
            }
        }
        InfPathSpec::Periodic { prefix, cycle } => {
            let p = prefix.len();
            let clen = cycle.len() as u64;
            let at = |i: u64| EdgeAt::Edge(spec.edge_at(i));
            let guard = p + 2 * clen + 8;
            let mut segments: Vec<Segment> = Vec::new();
            let mut starts: BTreeMap<u64, usize> = BTreeMap::new();
            let mut i = 1u64;
            loop {
                if i > p {
                    let phase = (i - p - 1) % clen;
                    if let Some(k) = starts.get(&phase) {
                        let cycle_segments = segments.split_off(*k);
                        debug_assert!(!cycle_segments.is_empty());
                        return Ok(SpecFactorization {
                            prefix: segments,
                            rest: SpecRest::Cycle(cycle_segments),
                        });
                    }
                    starts.insert(phase, segments.len());
                }
                match reader.parse(&at, i, guard)? {
                    Some((seg, next)) => {
                        segments.push(seg);
                        i = next;
                    }
                    None => unreachable!("infinite stream"),
                }
            }
        }
    }
}

fn image_path(m: &CollapseMap, range: VertexRef, segments: &[Segment]) -> Result<Path> {
    if segments.is_empty() {
        return Ok(Path::at(range));
    }
    let edges: Vec<EdgeRef> = segments
        .iter()
        .map(|s| s.image_edge(m))
        .collect::<Result<_>>()?;
    Path::from_edges(m.collapsed(), edges)
}

/// The finite path bijection: maps a path between surviving vertices to the
/// collapsed graph, segment by segment. Range and source are preserved.
pub fn phi(m: &CollapseMap, path: &Path) -> Result<Path> {
    let segments = factorize_path(m, path)?;
    image_path(m, path.range().clone(), &segments)
}

fn expand_edge(m: &CollapseMap, e: &EdgeRef) -> Result<Vec<EdgeRef>> {
    if let EdgeRef::Family { family, index } = e {
        if let Some(tail) = m.tail_for_family(family) {
            let (position, label) = m.entry_for_index(tail, *index)?;
            let mut edges: Vec<EdgeRef> = (1..=position)
                .map(|i| EdgeRef::step(tail.clone(), i))
                .collect();
            edges.push(EdgeRef::entry(tail.clone(), position, label));
            return Ok(edges);
        }
    }
    if m.original().has_edge(e) {
        Ok(vec![e.clone()])
    } else {
        Err(Error::UnknownEdge(e.to_string()))
    }
}

/// Inverse of [`phi`]: shared edges map to themselves, generated family
/// edges expand back into their collapsed pieces.
pub fn phi_inv(m: &CollapseMap, path: &Path) -> Result<Path> {
    if !m.collapsed().has_vertex(path.range()) {
        return Err(Error::UnknownVertex(path.range().to_string()));
    }
    let mut edges = Vec::new();
    for e in path.edges() {
        edges.extend(expand_edge(m, e)?);
    }
    if edges.is_empty() {
        Ok(Path::at(path.range().clone()))
    } else {
        Path::from_edges(m.original(), edges)
    }
}

/// The boundary path bijection: an infinite path absorbed by a collapsed
/// tail maps to the finite boundary path in front of it; otherwise the
/// segment-wise image is again a represented infinite path.
pub fn phi_inf(m: &CollapseMap, spec: &InfPathSpec) -> Result<BoundaryPath> {
    let fact = factorize_spec(m, spec)?;
    let prefix = image_path(m, spec.range().clone(), &fact.prefix)?;
    match fact.rest {
        SpecRest::Absorbed(_) => Ok(BoundaryPath::Finite(prefix)),
        SpecRest::Cycle(segments) => {
            let cycle: Vec<EdgeRef> = segments
                .iter()
                .map(|s| s.image_edge(m))
                .collect::<Result<_>>()?;
            Ok(BoundaryPath::Infinite(InfPathSpec::periodic(
                m.collapsed(),
                prefix,
                cycle,
            )?))
        }
        SpecRest::Foreign { tail, .. } => Ok(BoundaryPath::Infinite(InfPathSpec::tail_absorbed(
            m.collapsed(),
            prefix,
            tail,
        )?)),
    }
}

/// Inverse of [`phi_inf`]. A finite boundary path must end at the attach
/// vertex of a collapsed tail, which it then absorbs.
pub fn phi_inf_inv(m: &CollapseMap, x: &BoundaryPath) -> Result<InfPathSpec> {
    x.check_in(m.collapsed())?;
    match x {
        BoundaryPath::Finite(p) => {
            let src = p.source(m.collapsed())?;
            let VertexRef::Core(attach) = &src else {
                return Err(Error::NoPreimage(format!(
                    "`{src}` is not a core vertex"
                )));
            };
            let tail = m.collapsed_tail_at(attach).ok_or_else(|| {
                Error::NoPreimage(format!("no collapsed tail attaches at `{attach}`"))
            })?;
            InfPathSpec::tail_absorbed(m.original(), phi_inv(m, p)?, tail.clone())
        }
        BoundaryPath::Infinite(InfPathSpec::Periodic { prefix, cycle }) => {
            let mut cycle_edges = Vec::new();
            for e in cycle {
                cycle_edges.extend(expand_edge(m, e)?);
            }
            InfPathSpec::periodic(m.original(), phi_inv(m, prefix)?, cycle_edges)
        }
        BoundaryPath::Infinite(InfPathSpec::TailAbsorbed { prefix, tail, .. }) => {
            InfPathSpec::tail_absorbed(m.original(), phi_inv(m, prefix)?, tail.clone())
        }
    }
}

/// Materializes the first `n` segments of a factorization.
fn first_segments(fact: &SpecFactorization, n: usize) -> Result<Vec<Segment>> {
    let mut out: Vec<Segment> = fact.prefix.iter().take(n).cloned().collect();
    if out.len() == n {
        return Ok(out);
    }
    match &fact.rest {
        SpecRest::Absorbed(_) => Err(Error::Internal(
            "requested more segments than the absorbed path has".into(),
        )),
        SpecRest::Cycle(cycle) => {
            let mut i = 0usize;
            while out.len() < n {
                out.push(cycle[i % cycle.len()].clone());
                i += 1;
            }
            Ok(out)
        }
        SpecRest::Foreign { tail, first_step } => {
            let mut step = *first_step;
            while out.len() < n {
                out.push(Segment::Plain(EdgeRef::step(tail.clone(), step)));
                step += 1;
            }
            Ok(out)
        }
    }
}

/// Constructive openness of the image direction: given a basic
/// `Z(stem \ forbidden)` of the collapsed graph and a represented infinite
/// path `λ` whose image lies in it, produces a finite path `γ` of the
/// original graph with `λ ∈ Z(γ)` and the whole of `Z(γ)` (restricted to
/// infinite paths at surviving vertices) mapping into the basic.
///
/// When `λ` carries strictly more segments than the stem is long, `γ` is the
/// first `|stem|+1` segments; when `λ` is the stem's preimage followed by a
/// collapsed tail, `γ` extends that preimage far enough down the tail to
/// outrun every forbidden edge. The result is checked against the
/// membership oracle before being returned.
pub fn open_image_witness(
    m: &CollapseMap,
    z: &CylinderBasic,
    lambda: &InfPathSpec,
) -> Result<Path> {
    let image = phi_inf(m, lambda)?;
    if !member(&Point::from(image.clone()), z) {
        return Err(Error::Precondition(format!(
            "image of `{lambda}` misses {z}"
        )));
    }
    let fact = factorize_spec(m, lambda)?;
    let alen = z.stem.len() as usize;

    let absorbed_exactly = matches!(&fact.rest, SpecRest::Absorbed(_)) && fact.prefix.len() == alen;
    let gamma = if absorbed_exactly {
        let SpecRest::Absorbed(tail) = &fact.rest else {
            unreachable!()
        };
        let mut n_steps = 0u64;
        for e in &z.forbidden {
            let EdgeRef::Family { family, index } = e else {
                return Err(Error::Internal(format!(
                    "forbidden edge {e} at a collapsed attach vertex is not a family edge"
                )));
            };
            if m.tail_for_family(family) != Some(tail) {
                return Err(Error::Internal(format!(
                    "forbidden edge {e} does not belong to collapsed tail `{tail}`"
                )));
            }
            let (position, _) = m.entry_for_index(tail, *index)?;
            n_steps = n_steps.max(position + 1);
        }
        let mut gamma = phi_inv(m, &z.stem)?;
        for i in 1..=n_steps {
            gamma = gamma.extended(m.original(), EdgeRef::step(tail.clone(), i))?;
        }
        gamma
    } else {
        let segments = first_segments(&fact, alen + 1)?;
        let edges: Vec<EdgeRef> = segments.iter().flat_map(|s| s.edges()).collect();
        Path::from_edges(m.original(), edges)?
    };

    // Self-check: the point lies over the witness, and the witness forces
    // the image into the basic.
    if !lambda.starts_with(&gamma) {
        return Err(Error::WitnessCheckFailed(format!(
            "`{lambda}` does not extend `{gamma}`"
        )));
    }
    if absorbed_exactly {
        if phi_inv(m, &z.stem)?.len() > gamma.len() {
            return Err(Error::WitnessCheckFailed("witness shorter than stem".into()));
        }
    } else {
        let segments = factorize_path(m, &gamma)?;
        let image = image_path(m, gamma.range().clone(), &segments)?;
        if !z.stem.is_prefix_of(&image) {
            return Err(Error::WitnessCheckFailed(format!(
                "image `{image}` of the witness does not extend the stem"
            )));
        }
        if let Some(next) = image.edge_at(z.stem.len() + 1) {
            if z.forbidden.contains(next) {
                return Err(Error::WitnessCheckFailed(format!(
                    "image of the witness continues with forbidden edge {next}"
                )));
            }
        }
    }
    Ok(gamma)
}

/// Constructive openness of the preimage direction: given a stem `γ` of the
/// original graph and a boundary path `x` of the collapsed graph whose
/// preimage extends `γ`, produces a basic `Z(α \ G)` of the collapsed graph
/// with `x ∈ Z(α \ G)` and every boundary path in it pulled back into
/// `Z(γ)`.
pub fn open_preimage_witness(
    m: &CollapseMap,
    gamma: &Path,
    x: &BoundaryPath,
) -> Result<CylinderBasic> {
    gamma.check_in(m.original())?;
    let lambda = phi_inf_inv(m, x)?;
    if !lambda.starts_with(gamma) {
        return Err(Error::Precondition(format!(
            "preimage of `{x}` does not extend `{gamma}`"
        )));
    }
    let result = match x {
        BoundaryPath::Infinite(spec) => {
            let fact = factorize_spec(m, &lambda)?;
            let mut j = 0usize;
            let mut covered = 0u64;
            while covered < gamma.len() {
                let segs = first_segments(&fact, j + 1)?;
                covered = segs.iter().map(|s| s.len()).sum();
                j += 1;
            }
            let segments = first_segments(&fact, j)?;
            let alpha = image_path(m, spec.range().clone(), &segments)?;
            CylinderBasic::whole(alpha)
        }
        BoundaryPath::Finite(p) => {
            let omega = phi_inv(m, p)?;
            let mut forbidden = BTreeSet::new();
            if gamma.len() > omega.len() {
                let InfPathSpec::TailAbsorbed { tail, .. } = &lambda else {
                    return Err(Error::Internal(
                        "finite boundary path with non-absorbed preimage".into(),
                    ));
                };
                let j = gamma.len() - omega.len();
                if let Some(family) = m.family_for_tail(tail) {
                    for position in 1..j {
                        for entry in m.original().entries_at(tail, position) {
                            let index = m.index_for_entry(tail, position, &entry.label)?;
                            forbidden.insert(EdgeRef::family(family.clone(), index));
                        }
                    }
                }
            }
            CylinderBasic::new(m.collapsed(), p.clone(), forbidden)?
        }
    };
    let as_point = Point::from(x.clone());
    if !member(&as_point, &result) {
        return Err(Error::WitnessCheckFailed(format!(
            "`{x}` is not in the constructed basic {result}"
        )));
    }
    Ok(result)
}
