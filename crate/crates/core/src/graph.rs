//! Finitely presented directed graphs with infinite receivers and tails.
//!
//! A presentation consists of a finite core (vertices and edges), a finite
//! list of *infinite families* — countably many parallel edges `f[1], f[2],
//! …` sharing one range vertex, with sources following an eventually
//! periodic pattern — and a finite list of *tails*. A tail `t` attached at a
//! vertex `a` contributes fresh vertices `t[1], t[2], …` and step edges
//! `t#1, t#2, …` with `r(t#1) = a`, `s(t#i) = t[i]`, `r(t#(i+1)) = t[i]`,
//! together with a schedule of *entry edges*: at position `j` the schedule
//! lists edges from core vertices into `t[j]`.
//!
//! Paths compose at the source end: a path `μ = μ_1 … μ_n` requires
//! `s(μ_i) = r(μ_{i+1})`, so `r(μ) = r(μ_1)` and `s(μ) = s(μ_n)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::seq::{EpSeq, Occurrences};

/// A reference to a vertex: either a core vertex or the `index`-th vertex of
/// a tail (1-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexRef {
    Core(String),
    Tail { tail: String, index: u64 },
}

impl VertexRef {
    pub fn core(name: impl Into<String>) -> Self {
        VertexRef::Core(name.into())
    }

    pub fn tail(tail: impl Into<String>, index: u64) -> Self {
        VertexRef::Tail {
            tail: tail.into(),
            index,
        }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexRef::Core(v) => write!(f, "{v}"),
            VertexRef::Tail { tail, index } => write!(f, "{tail}[{index}]"),
        }
    }
}

/// A reference to an edge of a presented graph.
///
/// * `Core` — a finite core edge, by id.
/// * `Family { family, index }` — the `index`-th edge of an infinite family,
///   written `family[index]`.
/// * `Step { tail, index }` — the `index`-th step edge of a tail, written
///   `tail#index`.
/// * `Entry { tail, position, label }` — the entry labelled `label` at
///   schedule position `position` of a tail, written `label[position]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeRef {
    Core(String),
    Family { family: String, index: u64 },
    Step { tail: String, index: u64 },
    Entry {
        tail: String,
        position: u64,
        label: String,
    },
}

impl EdgeRef {
    pub fn core(name: impl Into<String>) -> Self {
        EdgeRef::Core(name.into())
    }

    pub fn family(family: impl Into<String>, index: u64) -> Self {
        EdgeRef::Family {
            family: family.into(),
            index,
        }
    }

    pub fn step(tail: impl Into<String>, index: u64) -> Self {
        EdgeRef::Step {
            tail: tail.into(),
            index,
        }
    }

    pub fn entry(tail: impl Into<String>, position: u64, label: impl Into<String>) -> Self {
        EdgeRef::Entry {
            tail: tail.into(),
            position,
            label: label.into(),
        }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeRef::Core(e) => write!(f, "{e}"),
            EdgeRef::Family { family, index } => write!(f, "{family}[{index}]"),
            EdgeRef::Step { tail, index } => write!(f, "{tail}#{index}"),
            EdgeRef::Entry {
                position, label, ..
            } => write!(f, "{label}[{position}]"),
        }
    }
}

/// An entry of a tail schedule: an edge from a core vertex into a tail
/// vertex. The edge is identified by `(tail, position, label)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entry {
    pub label: String,
    pub source: String,
}

impl Entry {
    pub fn new(label: impl Into<String>, source: impl Into<String>) -> Self {
        Entry {
            label: label.into(),
            source: source.into(),
        }
    }
}

/// Countably many parallel edges `family[1], family[2], …` into `range`,
/// with sources following an eventually periodic pattern of core vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfiniteFamily {
    pub range: String,
    pub sources: EpSeq<String>,
}

/// Schedule of a tail: position `j` lists the entries into the tail vertex
/// `t[j]`. Absent positions carry no entries.
pub type Schedule = EpSeq<Vec<Entry>>;

/// An infinite tail attached at a core vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tail {
    pub attach: String,
    pub schedule: Schedule,
}

/// How many entries a schedule carries in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    Empty,
    FinitelyMany(u64),
    Infinite,
}

pub fn schedule_kind(schedule: &Schedule) -> ScheduleKind {
    match schedule.occurrences(|slot| !slot.is_empty()) {
        Occurrences::Infinite => ScheduleKind::Infinite,
        Occurrences::Finite(0) => ScheduleKind::Empty,
        Occurrences::Finite(_) => {
            let mut total = 0u64;
            match schedule {
                EpSeq::Periodic { prefix, .. } => {
                    for slot in prefix {
                        total += slot.len() as u64;
                    }
                }
                EpSeq::FiniteSupport(map) => {
                    for slot in map.values() {
                        total += slot.len() as u64;
                    }
                }
            }
            ScheduleKind::FinitelyMany(total)
        }
    }
}

/// In-degree of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(n) => write!(f, "{n}"),
            Degree::Infinite => write!(f, "infinite"),
        }
    }
}

/// One problem found by [`PresentedGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationIssue {
    pub offender: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.offender, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn summary(&self) -> String {
        self.issues
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// A finitely presented directed graph.
///
/// All identifiers — core vertices, core edges, family ids, tail ids and
/// entry labels — live in one namespace and must be pairwise distinct, which
/// keeps every textual reference unambiguous.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PresentedGraph {
    core_vertices: BTreeSet<String>,
    core_edges: BTreeMap<String, (String, String)>, // id -> (source, range)
    families: BTreeMap<String, InfiniteFamily>,
    tails: BTreeMap<String, Tail>,
}

impl PresentedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn name_in_use(&self, name: &str) -> bool {
        self.core_vertices.contains(name)
            || self.core_edges.contains_key(name)
            || self.families.contains_key(name)
            || self.tails.contains_key(name)
            || self.entry_labels().contains(name)
    }

    fn entry_labels(&self) -> BTreeSet<&str> {
        let mut labels = BTreeSet::new();
        for tail in self.tails.values() {
            let slots: Vec<&Vec<Entry>> = match &tail.schedule {
                EpSeq::Periodic { prefix, cycle } => prefix.iter().chain(cycle.iter()).collect(),
                EpSeq::FiniteSupport(map) => map.values().collect(),
            };
            for slot in slots {
                for entry in slot {
                    labels.insert(entry.label.as_str());
                }
            }
        }
        labels
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> Result<()> {
        let id = id.into();
        if self.name_in_use(&id) {
            return Err(Error::DuplicateName(id));
        }
        self.core_vertices.insert(id);
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        source: impl Into<String>,
        range: impl Into<String>,
    ) -> Result<()> {
        let id = id.into();
        if self.name_in_use(&id) {
            return Err(Error::DuplicateName(id));
        }
        self.core_edges.insert(id, (source.into(), range.into()));
        Ok(())
    }

    pub fn add_family(
        &mut self,
        id: impl Into<String>,
        range: impl Into<String>,
        sources: EpSeq<String>,
    ) -> Result<()> {
        let id = id.into();
        if self.name_in_use(&id) {
            return Err(Error::DuplicateName(id));
        }
        self.families.insert(
            id,
            InfiniteFamily {
                range: range.into(),
                sources,
            },
        );
        Ok(())
    }

    pub fn add_tail(
        &mut self,
        id: impl Into<String>,
        attach: impl Into<String>,
        schedule: Schedule,
    ) -> Result<()> {
        let id = id.into();
        if self.name_in_use(&id) {
            return Err(Error::DuplicateName(id));
        }
        let mut fresh = BTreeSet::new();
        for_each_slot(&schedule, |_, slot| {
            for entry in slot {
                fresh.insert(entry.label.clone());
            }
        });
        for label in &fresh {
            if self.name_in_use(label) || *label == id {
                return Err(Error::DuplicateName(label.clone()));
            }
        }
        self.tails.insert(
            id,
            Tail {
                attach: attach.into(),
                schedule,
            },
        );
        Ok(())
    }

    // --- accessors -------------------------------------------------------

    pub fn core_vertices(&self) -> impl Iterator<Item = &String> {
        self.core_vertices.iter()
    }

    pub fn core_edges(&self) -> impl Iterator<Item = (&String, &(String, String))> {
        self.core_edges.iter()
    }

    pub fn families(&self) -> impl Iterator<Item = (&String, &InfiniteFamily)> {
        self.families.iter()
    }

    pub fn tails(&self) -> impl Iterator<Item = (&String, &Tail)> {
        self.tails.iter()
    }

    pub fn family(&self, id: &str) -> Result<&InfiniteFamily> {
        self.families
            .get(id)
            .ok_or_else(|| Error::UnknownFamily(id.to_string()))
    }

    pub fn tail(&self, id: &str) -> Result<&Tail> {
        self.tails
            .get(id)
            .ok_or_else(|| Error::UnknownTail(id.to_string()))
    }

    pub fn has_core_vertex(&self, id: &str) -> bool {
        self.core_vertices.contains(id)
    }

    pub fn has_vertex(&self, v: &VertexRef) -> bool {
        match v {
            VertexRef::Core(id) => self.core_vertices.contains(id),
            VertexRef::Tail { tail, index } => *index >= 1 && self.tails.contains_key(tail),
        }
    }

    /// Entries into tail vertex `tail[position]`; empty when absent.
    pub fn entries_at(&self, tail: &str, position: u64) -> Vec<Entry> {
        self.tails
            .get(tail)
            .and_then(|t| t.schedule.at(position))
            .cloned()
            .unwrap_or_default()
    }

    fn entry_source(&self, tail: &str, position: u64, label: &str) -> Option<String> {
        self.entries_at(tail, position)
            .into_iter()
            .find(|e| e.label == label)
            .map(|e| e.source)
    }

    pub fn has_edge(&self, e: &EdgeRef) -> bool {
        match e {
            EdgeRef::Core(id) => self.core_edges.contains_key(id),
            EdgeRef::Family { family, index } => {
                *index >= 1
                    && self
                        .families
                        .get(family)
                        .map(|f| f.sources.at(*index).is_some())
                        .unwrap_or(false)
            }
            EdgeRef::Step { tail, index } => *index >= 1 && self.tails.contains_key(tail),
            EdgeRef::Entry {
                tail,
                position,
                label,
            } => self.entry_source(tail, *position, label).is_some(),
        }
    }

    /// `(source, range)` of an edge.
    pub fn endpoints(&self, e: &EdgeRef) -> Result<(VertexRef, VertexRef)> {
        match e {
            EdgeRef::Core(id) => {
                let (s, r) = self
                    .core_edges
                    .get(id)
                    .ok_or_else(|| Error::UnknownEdge(id.clone()))?;
                Ok((VertexRef::core(s.clone()), VertexRef::core(r.clone())))
            }
            EdgeRef::Family { family, index } => {
                let fam = self.family(family)?;
                let src = fam
                    .sources
                    .at(*index)
                    .ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
                Ok((
                    VertexRef::core(src.clone()),
                    VertexRef::core(fam.range.clone()),
                ))
            }
            EdgeRef::Step { tail, index } => {
                let t = self.tail(tail)?;
                if *index == 0 {
                    return Err(Error::UnknownEdge(e.to_string()));
                }
                let range = if *index == 1 {
                    VertexRef::core(t.attach.clone())
                } else {
                    VertexRef::tail(tail.clone(), index - 1)
                };
                Ok((VertexRef::tail(tail.clone(), *index), range))
            }
            EdgeRef::Entry {
                tail,
                position,
                label,
            } => {
                let src = self
                    .entry_source(tail, *position, label)
                    .ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
                Ok((
                    VertexRef::core(src),
                    VertexRef::tail(tail.clone(), *position),
                ))
            }
        }
    }

    pub fn source(&self, e: &EdgeRef) -> Result<VertexRef> {
        Ok(self.endpoints(e)?.0)
    }

    pub fn range(&self, e: &EdgeRef) -> Result<VertexRef> {
        Ok(self.endpoints(e)?.1)
    }

    pub fn is_row_finite(&self) -> bool {
        self.families.is_empty()
    }

    // --- degree queries ---------------------------------------------------

    /// Number of edges into `v`.
    pub fn in_degree(&self, v: &VertexRef) -> Result<Degree> {
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        match v {
            VertexRef::Core(id) => {
                if self.families.values().any(|f| f.range == *id) {
                    return Ok(Degree::Infinite);
                }
                let cores = self
                    .core_edges
                    .values()
                    .filter(|(_, rng)| rng == id)
                    .count() as u64;
                let steps = self.tails.values().filter(|t| t.attach == *id).count() as u64;
                Ok(Degree::Finite(cores + steps))
            }
            VertexRef::Tail { tail, index } => {
                let entries = self.entries_at(tail, *index).len() as u64;
                Ok(Degree::Finite(1 + entries))
            }
        }
    }

    /// Core vertices receiving zero or infinitely many edges. Tail vertices
    /// always receive at least the next step edge, so only core vertices can
    /// be singular.
    pub fn singular_vertices(&self) -> BTreeSet<String> {
        self.core_vertices
            .iter()
            .filter(|v| {
                matches!(
                    self.in_degree(&VertexRef::core((*v).clone())),
                    Ok(Degree::Finite(0)) | Ok(Degree::Infinite)
                )
            })
            .cloned()
            .collect()
    }

    /// First `k` edges of `r^{-1}(v)` in canonical order: core edges by id,
    /// then first step edges of attached tails by tail id, then family edges
    /// by (family id, index); at a tail vertex, the next step edge and then
    /// the entries by label.
    pub fn incoming_edges(&self, v: &VertexRef, k: usize) -> Result<Vec<EdgeRef>> {
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        let mut out = Vec::new();
        match v {
            VertexRef::Core(id) => {
                for (eid, (_, rng)) in &self.core_edges {
                    if rng == id && out.len() < k {
                        out.push(EdgeRef::core(eid.clone()));
                    }
                }
                for (tid, tail) in &self.tails {
                    if tail.attach == *id && out.len() < k {
                        out.push(EdgeRef::step(tid.clone(), 1));
                    }
                }
                for (fid, fam) in &self.families {
                    if fam.range == *id {
                        let mut index = 1u64;
                        while out.len() < k && fam.sources.at(index).is_some() {
                            out.push(EdgeRef::family(fid.clone(), index));
                            index += 1;
                        }
                    }
                }
            }
            VertexRef::Tail { tail, index } => {
                if k > 0 {
                    out.push(EdgeRef::step(tail.clone(), index + 1));
                }
                let mut entries = self.entries_at(tail, *index);
                entries.sort_by(|a, b| a.label.cmp(&b.label));
                for e in entries {
                    if out.len() < k {
                        out.push(EdgeRef::entry(tail.clone(), *index, e.label));
                    }
                }
            }
        }
        Ok(out)
    }

    /// All edges into `v` when the in-degree is finite.
    pub fn all_incoming_edges(&self, v: &VertexRef) -> Result<Option<Vec<EdgeRef>>> {
        match self.in_degree(v)? {
            Degree::Infinite => Ok(None),
            Degree::Finite(n) => Ok(Some(self.incoming_edges(v, n as usize)?)),
        }
    }

    /// Edges with source `v`. Infinite families make this unbounded when `v`
    /// occurs in a pattern cycle, so the result is truncated to `k` edges.
    pub fn outgoing_edges(&self, v: &VertexRef, k: usize) -> Result<Vec<EdgeRef>> {
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        let mut out = Vec::new();
        match v {
            VertexRef::Core(id) => {
                for (eid, (src, _)) in &self.core_edges {
                    if src == id && out.len() < k {
                        out.push(EdgeRef::core(eid.clone()));
                    }
                }
                for (tid, tail) in &self.tails {
                    match &tail.schedule {
                        EpSeq::FiniteSupport(map) => {
                            for (pos, slot) in map {
                                for entry in slot {
                                    if entry.source == *id && out.len() < k {
                                        out.push(EdgeRef::entry(
                                            tid.clone(),
                                            *pos,
                                            entry.label.clone(),
                                        ));
                                    }
                                }
                            }
                        }
                        EpSeq::Periodic { prefix, cycle } => {
                            for (i, slot) in prefix.iter().enumerate() {
                                for entry in slot {
                                    if entry.source == *id && out.len() < k {
                                        out.push(EdgeRef::entry(
                                            tid.clone(),
                                            i as u64 + 1,
                                            entry.label.clone(),
                                        ));
                                    }
                                }
                            }
                            let hits: Vec<(usize, &Entry)> = cycle
                                .iter()
                                .enumerate()
                                .flat_map(|(i, slot)| {
                                    slot.iter().map(move |e| (i, e))
                                })
                                .filter(|(_, e)| e.source == *id)
                                .collect();
                            if !hits.is_empty() {
                                // These recur at every turn of the cycle.
                                let mut turn = 0u64;
                                while out.len() < k {
                                    for (i, entry) in &hits {
                                        let pos = prefix.len() as u64
                                            + turn * cycle.len() as u64
                                            + *i as u64
                                            + 1;
                                        if out.len() < k {
                                            out.push(EdgeRef::entry(
                                                tid.clone(),
                                                pos,
                                                entry.label.clone(),
                                            ));
                                        }
                                    }
                                    turn += 1;
                                }
                            }
                        }
                    }
                }
                for (fid, fam) in &self.families {
                    match fam.sources.occurrences(|s| s == id) {
                        Occurrences::Finite(0) => {}
                        Occurrences::Finite(_) => {
                            // All occurrences sit in the prefix.
                            for index in 1..=fam.sources.inspection_horizon() {
                                if fam.sources.at(index) == Some(id) && out.len() < k {
                                    out.push(EdgeRef::family(fid.clone(), index));
                                }
                            }
                        }
                        Occurrences::Infinite => {
                            let mut index = 1u64;
                            while out.len() < k {
                                if fam.sources.at(index) == Some(id) {
                                    out.push(EdgeRef::family(fid.clone(), index));
                                }
                                index += 1;
                            }
                        }
                    }
                }
            }
            VertexRef::Tail { tail, index } => {
                if k > 0 {
                    out.push(EdgeRef::step(tail.clone(), *index));
                }
            }
        }
        Ok(out)
    }

    /// Whether any edge other than `not` has source `v`.
    pub fn has_other_outgoing(&self, v: &VertexRef, not: &EdgeRef) -> Result<Option<EdgeRef>> {
        let out = self.outgoing_edges(v, 2)?;
        Ok(out.into_iter().find(|e| e != not))
    }

    // --- validation -------------------------------------------------------

    /// Checks every structural invariant of the presentation and reports all
    /// violations with the offending identifier.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let mut seen: BTreeMap<&str, u32> = BTreeMap::new();
        for v in &self.core_vertices {
            *seen.entry(v.as_str()).or_default() += 1;
        }
        for e in self.core_edges.keys() {
            *seen.entry(e.as_str()).or_default() += 1;
        }
        for f in self.families.keys() {
            *seen.entry(f.as_str()).or_default() += 1;
        }
        for t in self.tails.keys() {
            *seen.entry(t.as_str()).or_default() += 1;
        }
        let mut label_owners: BTreeMap<String, BTreeSet<&String>> = BTreeMap::new();
        for (tid, tail) in &self.tails {
            for_each_slot(&tail.schedule, |_, slot| {
                for entry in slot {
                    label_owners.entry(entry.label.clone()).or_default().insert(tid);
                }
            });
        }
        for (label, owners) in &label_owners {
            if owners.len() > 1 || seen.contains_key(label.as_str()) {
                issues.push(ValidationIssue {
                    offender: label.clone(),
                    message: "duplicate id: entry label clashes with another name".into(),
                });
            }
        }
        for (name, count) in &seen {
            if *count > 1 {
                issues.push(ValidationIssue {
                    offender: (*name).to_string(),
                    message: "duplicate id".into(),
                });
            }
        }

        for (eid, (src, rng)) in &self.core_edges {
            for (role, v) in [("source", src), ("range", rng)] {
                if !self.core_vertices.contains(v) {
                    issues.push(ValidationIssue {
                        offender: eid.clone(),
                        message: format!("dangling {role} `{v}`"),
                    });
                }
            }
        }

        for (fid, fam) in &self.families {
            if !self.core_vertices.contains(&fam.range) {
                issues.push(ValidationIssue {
                    offender: fid.clone(),
                    message: format!("dangling range `{}`", fam.range),
                });
            }
            match &fam.sources {
                EpSeq::FiniteSupport(_) => issues.push(ValidationIssue {
                    offender: fid.clone(),
                    message: "family pattern must be eventually periodic with a nonempty cycle"
                        .into(),
                }),
                EpSeq::Periodic { prefix, cycle } => {
                    if cycle.is_empty() {
                        issues.push(ValidationIssue {
                            offender: fid.clone(),
                            message: "family pattern has an empty cycle".into(),
                        });
                    }
                    for v in prefix.iter().chain(cycle.iter()) {
                        if !self.core_vertices.contains(v) {
                            issues.push(ValidationIssue {
                                offender: fid.clone(),
                                message: format!("pattern source `{v}` is not a core vertex"),
                            });
                        }
                    }
                }
            }
        }

        for (tid, tail) in &self.tails {
            if !self.core_vertices.contains(&tail.attach) {
                issues.push(ValidationIssue {
                    offender: tid.clone(),
                    message: format!("attach vertex `{}` is not a core vertex", tail.attach),
                });
            }
            for_each_slot(&tail.schedule, |position, slot| {
                let mut labels = BTreeSet::new();
                for entry in slot {
                    if !labels.insert(&entry.label) {
                        issues.push(ValidationIssue {
                            offender: tid.clone(),
                            message: format!(
                                "duplicate entry label `{}` at position {position}",
                                entry.label
                            ),
                        });
                    }
                    if !self.core_vertices.contains(&entry.source) {
                        issues.push(ValidationIssue {
                            offender: tid.clone(),
                            message: format!(
                                "entry `{}` at position {position} has non-core source `{}`",
                                entry.label, entry.source
                            ),
                        });
                    }
                }
            });
            if let ScheduleKind::FinitelyMany(n) = schedule_kind(&tail.schedule) {
                issues.push(ValidationIssue {
                    offender: tid.clone(),
                    message: format!(
                        "schedule has {n} entries; a tail must carry zero or infinitely many (C5)"
                    ),
                });
            }
        }

        ValidationReport { issues }
    }

    /// Shorthand: validate and convert failures into an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report.summary()))
        }
    }
}

/// Applies `f` to every materialized slot of a schedule: the prefix and one
/// cycle of a periodic schedule (positions are representative), or the whole
/// support of a finite-support schedule.
pub(crate) fn for_each_slot(schedule: &Schedule, mut f: impl FnMut(u64, &Vec<Entry>)) {
    match schedule {
        EpSeq::Periodic { prefix, cycle } => {
            for (i, slot) in prefix.iter().enumerate() {
                f(i as u64 + 1, slot);
            }
            for (i, slot) in cycle.iter().enumerate() {
                f((prefix.len() + i) as u64 + 1, slot);
            }
        }
        EpSeq::FiniteSupport(map) => {
            for (pos, slot) in map {
                f(*pos, slot);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn point_graph_is_valid() {
        let g = fixtures::e_pt();
        assert!(g.validate().is_valid());
        assert_eq!(
            g.in_degree(&VertexRef::core("v")).unwrap(),
            Degree::Finite(0)
        );
    }

    #[test]
    fn e_omega_is_valid_with_expected_degrees() {
        let g = fixtures::e_omega();
        assert!(g.validate().is_valid());
        assert_eq!(g.in_degree(&VertexRef::core("v")).unwrap(), Degree::Infinite);
        assert_eq!(
            g.in_degree(&VertexRef::core("w")).unwrap(),
            Degree::Finite(0)
        );
        assert_eq!(
            g.singular_vertices().into_iter().collect::<Vec<_>>(),
            vec!["v".to_string(), "w".to_string()]
        );
    }

    #[test]
    fn e_ex_degrees_match_the_figure() {
        let g = fixtures::e_ex();
        assert_eq!(g.in_degree(&VertexRef::core("u")).unwrap(), Degree::Finite(2));
        assert_eq!(
            g.singular_vertices().into_iter().collect::<Vec<_>>(),
            vec!["w".to_string()]
        );
        assert_eq!(
            g.incoming_edges(&VertexRef::core("v"), 5).unwrap(),
            vec![EdgeRef::core("nu1")]
        );
    }

    #[test]
    fn single_nonempty_slot_with_empty_cycle_violates_c5() {
        let mut g = PresentedGraph::new();
        g.add_vertex("v").unwrap();
        g.add_vertex("w").unwrap();
        let schedule =
            EpSeq::FiniteSupport([(1u64, vec![Entry::new("a", "w")])].into_iter().collect());
        g.add_tail("t", "v", schedule).unwrap();
        let report = g.validate();
        assert!(!report.is_valid());
        assert!(report.summary().contains("C5"), "{}", report.summary());
    }

    #[test]
    fn entry_with_non_core_source_is_rejected() {
        let mut g = PresentedGraph::new();
        g.add_vertex("v").unwrap();
        let schedule = EpSeq::Periodic {
            prefix: vec![],
            cycle: vec![vec![Entry::new("a", "nowhere")]],
        };
        g.add_tail("t", "v", schedule).unwrap();
        assert!(!g.validate().is_valid());
    }

    #[test]
    fn family_enumeration_in_canonical_order() {
        let g = fixtures::e_omega();
        assert_eq!(
            g.incoming_edges(&VertexRef::core("v"), 3).unwrap(),
            vec![
                EdgeRef::family("e", 1),
                EdgeRef::family("e", 2),
                EdgeRef::family("e", 3)
            ]
        );
        assert!(g
            .incoming_edges(&VertexRef::core("v"), 2)
            .unwrap()
            .iter()
            .zip(g.incoming_edges(&VertexRef::core("v"), 3).unwrap().iter())
            .all(|(a, b)| a == b));
    }

    #[test]
    fn tail_vertex_degree_counts_entries() {
        let g = fixtures::f_omega();
        let tail = g
            .tails()
            .find(|(_, t)| t.attach == "v")
            .map(|(id, _)| id.clone())
            .unwrap();
        for j in 1..=6 {
            let entries = g.entries_at(&tail, j).len() as u64;
            assert_eq!(
                g.in_degree(&VertexRef::tail(tail.clone(), j)).unwrap(),
                Degree::Finite(1 + entries)
            );
        }
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let mut g = PresentedGraph::new();
        g.add_vertex("v").unwrap();
        assert_eq!(g.add_edge("v", "v", "v"), Err(Error::DuplicateName("v".into())));
    }

    #[test]
    fn endpoints_of_generated_edges() {
        let g = fixtures::f_ex();
        // Step edges run down the tail.
        let (s, r) = g.endpoints(&EdgeRef::step("nu", 1)).unwrap();
        assert_eq!(s, VertexRef::tail("nu", 1));
        assert_eq!(r, VertexRef::core("w"));
        let (s, r) = g.endpoints(&EdgeRef::step("nu", 3)).unwrap();
        assert_eq!(s, VertexRef::tail("nu", 3));
        assert_eq!(r, VertexRef::tail("nu", 2));
    }
}
