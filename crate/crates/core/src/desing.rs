//! Collapsibility checking, collapsing tails, desingularisation and bounded
//! isomorphism checking.
//!
//! An infinite path `μ` is *collapsible* when
//!
//! * (C1) no edge exits it,
//! * (C2) every vertex along it receives finitely many edges,
//! * (C3) its range receives only `μ_1`,
//! * (C4) its edges are pairwise distinct, and
//! * (C5) it has zero or infinitely many entries.
//!
//! Collapsing removes the vertices strictly inside the path and replaces
//! each divergent initial segment `μ_1 … μ_j e` by a single edge into the
//! range; the replacement edges of one tail form one infinite family whose
//! source pattern is read off the schedule. Desingularisation is the
//! reverse construction: it appends a tail at every singular vertex and
//! redistributes the incoming edges of infinite receivers along it, so that
//! collapsing the appended tails recovers the original graph up to
//! isomorphism.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{
    schedule_kind, Degree, EdgeRef, Entry, PresentedGraph, Schedule, ScheduleKind, VertexRef,
};
use crate::path::{InfPathSpec, Path};
use crate::path_maps::CollapseMap;
use crate::seq::EpSeq;

/// Verdict for one of the conditions C1–C5.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub passes: bool,
    /// Concrete witness of the failure (offending edge or count).
    pub witness: Option<String>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            passes: true,
            witness: None,
        }
    }

    fn fail(witness: impl Into<String>) -> Self {
        Verdict {
            passes: false,
            witness: Some(witness.into()),
        }
    }
}

/// Per-condition report of a collapsibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapsibleReport {
    pub c1: Verdict,
    pub c2: Verdict,
    pub c3: Verdict,
    pub c4: Verdict,
    pub c5: Verdict,
}

impl CollapsibleReport {
    pub fn all_pass(&self) -> bool {
        self.c1.passes && self.c2.passes && self.c3.passes && self.c4.passes && self.c5.passes
    }

    pub fn first_failure(&self) -> Option<(&'static str, &Verdict)> {
        [
            ("C1", &self.c1),
            ("C2", &self.c2),
            ("C3", &self.c3),
            ("C4", &self.c4),
            ("C5", &self.c5),
        ]
        .into_iter()
        .find(|(_, v)| !v.passes)
    }
}

impl fmt::Display for CollapsibleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, v) in [
            ("C1", &self.c1),
            ("C2", &self.c2),
            ("C3", &self.c3),
            ("C4", &self.c4),
            ("C5", &self.c5),
        ] {
            if v.passes {
                writeln!(f, "{name}: pass")?;
            } else {
                writeln!(
                    f,
                    "{name}: fail ({})",
                    v.witness.as_deref().unwrap_or("no witness")
                )?;
            }
        }
        Ok(())
    }
}

/// Checks C1–C5 for the infinite path of a declared tail.
pub fn check_collapsible_tail(g: &PresentedGraph, tail: &str) -> Result<CollapsibleReport> {
    let t = g.tail(tail)?;
    let spec = InfPathSpec::tail_absorbed(
        g,
        Path::at(VertexRef::core(t.attach.clone())),
        tail.to_string(),
    )?;
    check_collapsible(g, &spec)
}

/// Checks C1–C5 for an arbitrary represented infinite path.
///
/// For a path living entirely on a tail, C1, C2 and C4 hold by the shape of
/// the presentation (tail vertices emit a single edge, receive finitely
/// many, and step edges never repeat); they are still checked concretely on
/// the finite part so that the witnesses are honest.
pub fn check_collapsible(g: &PresentedGraph, spec: &InfPathSpec) -> Result<CollapsibleReport> {
    // Indices that see every distinct (edge, endpoints) situation.
    let window = match spec {
        InfPathSpec::Periodic { prefix, cycle } => prefix.len() + cycle.len() as u64,
        InfPathSpec::TailAbsorbed { prefix, tail, .. } => {
            prefix.len() + 1 + g.tail(tail)?.schedule.inspection_horizon()
        }
    };

    // C1: exits along the path.
    let mut c1 = Verdict::pass();
    'c1: for i in 1..=window {
        let mu_i = spec.edge_at(i);
        let v = g.source(&mu_i)?;
        for e in g.outgoing_edges(&v, 4)? {
            if e != mu_i {
                c1 = Verdict::fail(format!("edge {e} exits at position {i}"));
                break 'c1;
            }
        }
    }

    // C2: finite receivers along the path (including the range).
    let mut c2 = Verdict::pass();
    for i in 1..=window {
        let r = g.range(&spec.edge_at(i))?;
        if matches!(g.in_degree(&r)?, Degree::Infinite) {
            c2 = Verdict::fail(format!("vertex {r} at position {i} is an infinite receiver"));
            break;
        }
    }

    // C3: the range receives only μ_1.
    let range = spec.range().clone();
    let c3 = match g.in_degree(&range)? {
        Degree::Infinite => Verdict::fail(format!("range {range} is an infinite receiver")),
        Degree::Finite(n) => {
            let incoming = g.incoming_edges(&range, n as usize)?;
            let mu1 = spec.edge_at(1);
            match incoming.iter().find(|e| **e != mu1) {
                Some(extra) => Verdict::fail(format!("edge {extra} also has range {range}")),
                None if incoming.len() == 1 => Verdict::pass(),
                None => Verdict::fail(format!("range {range} receives {n} edges")),
            }
        }
    };

    // C4: pairwise distinct edges. A periodic spec always repeats; an
    // absorbed spec can only repeat inside its finite prefix (the
    // canonical form keeps steps of the absorbed tail out of it).
    let c4 = match spec {
        InfPathSpec::Periodic { prefix, cycle } => {
            let horizon = prefix.len() + 2 * cycle.len() as u64;
            first_repeat(spec, horizon)
                .map(|(i, j)| {
                    Verdict::fail(format!(
                        "edge {} occurs at positions {i} and {j}",
                        spec.edge_at(i)
                    ))
                })
                .unwrap_or_else(|| {
                    Verdict::fail(format!(
                        "cycle of length {} repeats every edge",
                        cycle.len()
                    ))
                })
        }
        InfPathSpec::TailAbsorbed { prefix, .. } => {
            match first_repeat(spec, prefix.len() + 1) {
                Some((i, j)) => Verdict::fail(format!(
                    "edge {} occurs at positions {i} and {j}",
                    spec.edge_at(i)
                )),
                None => Verdict::pass(),
            }
        }
    };

    // C5: zero or infinitely many entries. Entries are edges sharing a
    // range with some μ_i; distinct edges are counted.
    let c5 = {
        let mut finite_entries: BTreeSet<EdgeRef> = BTreeSet::new();
        let mut infinite = false;
        for i in 1..=window {
            let mu_i = spec.edge_at(i);
            let r = g.range(&mu_i)?;
            match g.in_degree(&r)? {
                Degree::Infinite => {
                    infinite = true;
                    break;
                }
                Degree::Finite(n) => {
                    for e in g.incoming_edges(&r, n as usize)? {
                        if e != mu_i {
                            finite_entries.insert(e);
                        }
                    }
                }
            }
        }
        if let InfPathSpec::TailAbsorbed {
            tail, first_step, ..
        } = spec
        {
            // The path visits tail vertices from position first_step - 1 on.
            let min_pos = first_step.saturating_sub(1).max(1);
            match schedule_kind(&g.tail(tail)?.schedule) {
                ScheduleKind::Infinite => infinite = true,
                ScheduleKind::Empty => {}
                ScheduleKind::FinitelyMany(_) => {
                    for_each_entry(&g.tail(tail)?.schedule, |pos, entry| {
                        if pos >= min_pos {
                            finite_entries.insert(EdgeRef::entry(
                                tail.clone(),
                                pos,
                                entry.label.clone(),
                            ));
                        }
                    });
                }
            }
        }
        if infinite || finite_entries.is_empty() {
            Verdict::pass()
        } else {
            let sample = finite_entries.iter().next().unwrap();
            Verdict::fail(format!(
                "{} entr{} ({}, …)",
                finite_entries.len(),
                if finite_entries.len() == 1 { "y" } else { "ies" },
                sample
            ))
        }
    };

    Ok(CollapsibleReport { c1, c2, c3, c4, c5 })
}

fn first_repeat(spec: &InfPathSpec, horizon: u64) -> Option<(u64, u64)> {
    let mut seen: BTreeMap<EdgeRef, u64> = BTreeMap::new();
    for i in 1..=horizon {
        let e = spec.edge_at(i);
        if let Some(j) = seen.get(&e) {
            return Some((*j, i));
        }
        seen.insert(e, i);
    }
    None
}

fn for_each_entry(schedule: &Schedule, mut f: impl FnMut(u64, &Entry)) {
    match schedule {
        EpSeq::Periodic { prefix, cycle } => {
            for (i, slot) in prefix.iter().enumerate() {
                for e in slot {
                    f(i as u64 + 1, e);
                }
            }
            for (i, slot) in cycle.iter().enumerate() {
                for e in slot {
                    f((prefix.len() + i) as u64 + 1, e);
                }
            }
        }
        EpSeq::FiniteSupport(map) => {
            for (pos, slot) in map {
                for e in slot {
                    f(*pos, e);
                }
            }
        }
    }
}

/// Result of collapsing a set of tails.
#[derive(Clone, Debug)]
pub struct CollapseOutcome {
    pub collapsed: PresentedGraph,
    pub map: CollapseMap,
}

/// Collapses the given tails simultaneously. Every tail must pass C1–C5;
/// the check is rerun here and failures are reported with the condition and
/// witness. Tails not in `tails` are carried over unchanged.
pub fn collapse(g: &PresentedGraph, tails: &BTreeSet<String>) -> Result<CollapseOutcome> {
    for tail in tails {
        let report = check_collapsible_tail(g, tail)?;
        if let Some((condition, verdict)) = report.first_failure() {
            return Err(Error::NotCollapsible {
                tail: tail.clone(),
                condition: condition.to_string(),
                witness: verdict.witness.clone().unwrap_or_default(),
            });
        }
    }

    let mut out = PresentedGraph::new();
    for v in g.core_vertices() {
        out.add_vertex(v.clone())?;
    }
    for (id, (src, rng)) in g.core_edges() {
        out.add_edge(id.clone(), src.clone(), rng.clone())?;
    }
    for (id, fam) in g.families() {
        out.add_family(id.clone(), fam.range.clone(), fam.sources.clone())?;
    }
    for (id, tail) in g.tails() {
        if !tails.contains(id) {
            out.add_tail(id.clone(), tail.attach.clone(), tail.schedule.clone())?;
        }
    }

    let mut generated: BTreeMap<String, Option<String>> = BTreeMap::new();
    for tail in tails {
        let t = g.tail(tail)?;
        match schedule_kind(&t.schedule) {
            ScheduleKind::Empty => {
                generated.insert(tail.clone(), None);
            }
            ScheduleKind::Infinite => {
                let sources = flatten_schedule_sources(&t.schedule)?;
                let name = fresh_name(&out, &format!("e_{tail}"));
                out.add_family(name.clone(), t.attach.clone(), sources)?;
                generated.insert(tail.clone(), Some(name));
            }
            ScheduleKind::FinitelyMany(_) => {
                return Err(Error::Internal(format!(
                    "tail `{tail}` passed C5 but has finitely many entries"
                )))
            }
        }
    }

    let map = CollapseMap::new(g.clone(), out.clone(), generated);
    Ok(CollapseOutcome {
        collapsed: out,
        map,
    })
}

/// Enumerates the schedule's entries in order of (position, slot order) and
/// packs their sources into an eventually periodic pattern: the replacement
/// edges of the collapsed tail, one per entry.
fn flatten_schedule_sources(schedule: &Schedule) -> Result<EpSeq<String>> {
    match schedule {
        EpSeq::FiniteSupport(_) => Err(Error::Internal(
            "cannot flatten a finite-support schedule into a family".into(),
        )),
        EpSeq::Periodic { prefix, cycle } => {
            let flat = |slots: &[Vec<Entry>]| -> Vec<String> {
                slots
                    .iter()
                    .flat_map(|slot| slot.iter().map(|e| e.source.clone()))
                    .collect()
            };
            let cycle_sources = flat(cycle);
            if cycle_sources.is_empty() {
                return Err(Error::Internal("schedule cycle carries no entries".into()));
            }
            Ok(EpSeq::Periodic {
                prefix: flat(prefix),
                cycle: cycle_sources,
            })
        }
    }
}

fn fresh_name(g: &PresentedGraph, base: &str) -> String {
    let taken = |name: &str| {
        g.core_vertices().any(|v| v == name)
            || g.core_edges().any(|(e, _)| e == name)
            || g.families().any(|(f, _)| f == name)
            || g.tails().any(|(t, _)| t == name)
    };
    if !taken(base) {
        return base.to_string();
    }
    for i in 1.. {
        let candidate = format!("{base}_{i}");
        if !taken(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// How incoming edges of an infinite receiver are spread along the appended
/// tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchedulePolicy {
    /// `k` edges per tail position, in order.
    PerPosition(u64),
    /// Position `j` takes `counts.at(j)` edges. The pattern must be
    /// eventually periodic with a positive cycle sum so that every edge
    /// gets placed.
    Counts(EpSeq<u64>),
}

impl Default for SchedulePolicy {
    fn default() -> Self {
        SchedulePolicy::PerPosition(1)
    }
}

impl SchedulePolicy {
    fn count_at(&self, j: u64) -> Result<u64> {
        match self {
            SchedulePolicy::PerPosition(k) => Ok(*k),
            SchedulePolicy::Counts(seq) => Ok(seq.at(j).copied().unwrap_or(0)),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SchedulePolicy::PerPosition(0) => {
                Err(Error::BadPolicy("zero edges per position".into()))
            }
            SchedulePolicy::PerPosition(_) => Ok(()),
            SchedulePolicy::Counts(EpSeq::Periodic { cycle, .. }) => {
                if cycle.iter().sum::<u64>() == 0 {
                    Err(Error::BadPolicy("cycle places no edges".into()))
                } else {
                    Ok(())
                }
            }
            SchedulePolicy::Counts(EpSeq::FiniteSupport(_)) => Err(Error::BadPolicy(
                "finite-support counts cannot place infinitely many edges".into(),
            )),
        }
    }
}

/// Result of a desingularisation: the new graph and the appended tails.
#[derive(Clone, Debug)]
pub struct DesingOutcome {
    pub graph: PresentedGraph,
    pub added_tails: BTreeSet<String>,
}

/// Appends a tail at every singular vertex of a tail-free presentation.
///
/// A source receives an entry-free tail. For an infinite receiver all of
/// its incoming edges — core edges first (by id), then family edges
/// interleaved round-robin across families — are redistributed along the
/// tail according to `policy`, leaving only the first step edge at the
/// vertex. The output is row-finite with no singular vertices, and every
/// appended tail is collapsible.
pub fn desingularise(g: &PresentedGraph, policy: &SchedulePolicy) -> Result<DesingOutcome> {
    if g.tails().next().is_some() {
        return Err(Error::HasTails);
    }
    g.ensure_valid()?;
    policy.validate()?;

    let singular = g.singular_vertices();
    let mut out = PresentedGraph::new();
    for v in g.core_vertices() {
        out.add_vertex(v.clone())?;
    }
    // Core edges into infinite receivers move onto the schedules.
    for (id, (src, rng)) in g.core_edges() {
        let moves = singular.contains(rng)
            && matches!(
                g.in_degree(&VertexRef::core(rng.clone()))?,
                Degree::Infinite
            );
        if !moves {
            out.add_edge(id.clone(), src.clone(), rng.clone())?;
        }
    }

    let mut added = BTreeSet::new();
    for v in &singular {
        let tail_id = fresh_name(&out, &format!("t_{v}"));
        let schedule = match g.in_degree(&VertexRef::core(v.clone()))? {
            Degree::Finite(0) => EpSeq::empty(),
            Degree::Finite(_) => unreachable!("singular vertex with finite nonzero degree"),
            Degree::Infinite => build_schedule(g, v, policy)?,
        };
        out.add_tail(tail_id.clone(), v.clone(), schedule)?;
        added.insert(tail_id);
    }

    debug_assert!(out.is_row_finite());
    debug_assert!(out.singular_vertices().is_empty());
    debug_assert!(out.validate().is_valid());
    Ok(DesingOutcome {
        graph: out,
        added_tails: added,
    })
}

/// The stream of incoming edges of `v` to be redistributed: core edges by
/// id, then family edges round-robin. Yields `(label, source)` pairs; the
/// stream is eventually periodic.
struct IncomingStream {
    cores: Vec<(String, String)>,
    families: Vec<(String, EpSeq<String>)>,
}

impl IncomingStream {
    /// 1-based element of the stream.
    fn entry(&self, n: u64) -> Entry {
        let m = self.cores.len() as u64;
        if n <= m {
            let (label, source) = &self.cores[n as usize - 1];
            Entry::new(label.clone(), source.clone())
        } else {
            let k = n - m - 1; // 0-based among family edges
            let nf = self.families.len() as u64;
            let (fid, pattern) = &self.families[(k % nf) as usize];
            let index = k / nf + 1;
            let source = pattern
                .at(index)
                .expect("family patterns are total")
                .clone();
            Entry::new(fid.clone(), source)
        }
    }

    /// Bounds after which the stream is purely periodic.
    fn periodicity(&self) -> (u64, u64) {
        let nf = self.families.len() as u64;
        debug_assert!(nf > 0);
        let max_prefix = self
            .families
            .iter()
            .map(|(_, p)| match p {
                EpSeq::Periodic { prefix, .. } => prefix.len() as u64,
                EpSeq::FiniteSupport(_) => unreachable!("validated"),
            })
            .max()
            .unwrap_or(0);
        let lcm_cycles = self
            .families
            .iter()
            .map(|(_, p)| match p {
                EpSeq::Periodic { cycle, .. } => cycle.len() as u64,
                EpSeq::FiniteSupport(_) => unreachable!("validated"),
            })
            .fold(1u64, lcm);
        (self.cores.len() as u64 + nf * max_prefix, nf * lcm_cycles)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Renames repeated labels within one schedule slot. Entry edges are
/// identified by `(tail, position, label)`, so a slot holding several edges
/// of one family needs distinct labels; the `k`-th repeat of `base` becomes
/// `base'k`, de-collided against every name of the input graph. The mapping
/// is a function of `(base, k)` alone, which keeps relabelled slots
/// periodic whenever the raw slots are.
struct Relabeler {
    reserved: BTreeSet<String>,
    table: BTreeMap<(String, u64), String>,
}

impl Relabeler {
    fn for_graph(g: &PresentedGraph) -> Self {
        let mut reserved = BTreeSet::new();
        reserved.extend(g.core_vertices().cloned());
        reserved.extend(g.core_edges().map(|(id, _)| id.clone()));
        reserved.extend(g.families().map(|(id, _)| id.clone()));
        Relabeler {
            reserved,
            table: BTreeMap::new(),
        }
    }

    fn label(&mut self, base: &str, occurrence: u64) -> String {
        if occurrence == 1 {
            return base.to_string();
        }
        if let Some(hit) = self.table.get(&(base.to_string(), occurrence)) {
            return hit.clone();
        }
        let mut candidate = format!("{base}'{occurrence}");
        while self.reserved.contains(&candidate) {
            candidate.push('\'');
        }
        self.reserved.insert(candidate.clone());
        self.table
            .insert((base.to_string(), occurrence), candidate.clone());
        candidate
    }

    fn relabel(&mut self, slot: Vec<Entry>) -> Vec<Entry> {
        let mut seen: BTreeMap<String, u64> = BTreeMap::new();
        slot.into_iter()
            .map(|e| {
                let n = seen.entry(e.label.clone()).or_insert(0);
                *n += 1;
                Entry::new(self.label(&e.label, *n), e.source)
            })
            .collect()
    }
}

/// Materializes the schedule that redistributes the incoming edges of the
/// infinite receiver `v` along a fresh tail, and detects its eventually
/// periodic description by simulating positions until the joint state of
/// the stream offset and the policy phase recurs.
fn build_schedule(g: &PresentedGraph, v: &str, policy: &SchedulePolicy) -> Result<Schedule> {
    let mut cores: Vec<(String, String)> = Vec::new();
    for (id, (src, rng)) in g.core_edges() {
        if rng == v {
            cores.push((id.clone(), src.clone()));
        }
    }
    let families: Vec<(String, EpSeq<String>)> = g
        .families()
        .filter(|(_, f)| f.range == v)
        .map(|(id, f)| (id.clone(), f.sources.clone()))
        .collect();
    let stream = IncomingStream { cores, families };
    let mut relabel = Relabeler::for_graph(g);
    let (stream_prefix, stream_period) = stream.periodicity();

    let (policy_prefix, policy_period) = match policy {
        SchedulePolicy::PerPosition(_) => (0u64, 1u64),
        SchedulePolicy::Counts(EpSeq::Periodic { prefix, cycle }) => {
            (prefix.len() as u64, cycle.len() as u64)
        }
        SchedulePolicy::Counts(EpSeq::FiniteSupport(_)) => unreachable!("validated"),
    };

    let mut slots: Vec<Vec<Entry>> = Vec::new();
    let mut consumed = 0u64;
    // state -> position index (0-based) at which it occurred
    let mut states: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    loop {
        let j = slots.len() as u64 + 1;
        if consumed >= stream_prefix && j > policy_prefix {
            let state = (
                (consumed + stream_period - stream_prefix) % stream_period,
                (j - policy_prefix - 1) % policy_period,
            );
            if let Some(start) = states.get(&state) {
                let prefix = slots[..*start].to_vec();
                let cycle = slots[*start..].to_vec();
                debug_assert!(!cycle.is_empty());
                let schedule = EpSeq::Periodic { prefix, cycle };
                verify_schedule(
                    &schedule,
                    &stream,
                    policy,
                    &mut relabel,
                    3 * slots.len() as u64 + 8,
                )?;
                return Ok(schedule);
            }
            states.insert(state, slots.len());
        }
        let take = policy.count_at(j)?;
        let raw: Vec<Entry> = (1..=take).map(|i| stream.entry(consumed + i)).collect();
        consumed += take;
        slots.push(relabel.relabel(raw));
        if slots.len() > 100_000 {
            return Err(Error::Internal(
                "schedule construction failed to close a cycle".into(),
            ));
        }
    }
}

/// Replays the detected eventually periodic schedule against the direct
/// simulation; a mismatch is an internal error rather than silent bad data.
fn verify_schedule(
    schedule: &Schedule,
    stream: &IncomingStream,
    policy: &SchedulePolicy,
    relabel: &mut Relabeler,
    horizon: u64,
) -> Result<()> {
    let mut consumed = 0u64;
    for j in 1..=horizon {
        let take = policy.count_at(j)?;
        let raw: Vec<Entry> = (1..=take).map(|i| stream.entry(consumed + i)).collect();
        let expected = relabel.relabel(raw);
        consumed += take;
        let got = schedule.at(j).cloned().unwrap_or_default();
        if got != expected {
            return Err(Error::Internal(format!(
                "schedule mismatch at position {j}"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// isomorphism checking
// ---------------------------------------------------------------------------

/// Number of edges between an ordered pair of core vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Count {
    Finite(u64),
    Infinite,
}

/// A found isomorphism: where the core vertices and the tails go. Edge
/// correspondences between matching vertex pairs follow by counting and are
/// not materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex_map: BTreeMap<String, String>,
    pub tail_map: BTreeMap<String, String>,
}

/// Result of [`iso_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoOutcome {
    Isomorphic(Isomorphism),
    NotIsomorphic,
    /// The core exceeded the brute-force bound; nothing was decided.
    BoundExceeded { core_size: usize, bound: usize },
}

impl IsoOutcome {
    pub fn found(&self) -> Option<&Isomorphism> {
        match self {
            IsoOutcome::Isomorphic(iso) => Some(iso),
            _ => None,
        }
    }
}

/// Cardinality of the edge set from `src` to `rng`, counting core edges and
/// family edges (infinitely many when `src` recurs in a pattern cycle).
fn pair_count(g: &PresentedGraph, src: &str, rng: &str) -> Count {
    let mut total = 0u64;
    for (_, (s, r)) in g.core_edges() {
        if s == src && r == rng {
            total += 1;
        }
    }
    for (_, fam) in g.families() {
        if fam.range == rng {
            match fam.sources.occurrences(|s| s == src) {
                crate::seq::Occurrences::Infinite => return Count::Infinite,
                crate::seq::Occurrences::Finite(n) => total += n,
            }
        }
    }
    Count::Finite(total)
}

/// Cardinality of the full edge set emitted by a core vertex, counting core
/// edges, family edges sourced there and schedule entries sourced there.
/// Unlike raw core-edge counts this is invariant under re-presenting edges
/// as family members, so it is safe for pruning.
fn out_count(g: &PresentedGraph, v: &str) -> Count {
    let mut total = 0u64;
    for (_, (s, _)) in g.core_edges() {
        if s == v {
            total += 1;
        }
    }
    for (_, fam) in g.families() {
        match fam.sources.occurrences(|s| s == v) {
            crate::seq::Occurrences::Infinite => return Count::Infinite,
            crate::seq::Occurrences::Finite(n) => total += n,
        }
    }
    for (_, tail) in g.tails() {
        let hits = |slot: &Vec<Entry>| slot.iter().any(|e| e.source == v);
        match tail.schedule.occurrences(hits) {
            crate::seq::Occurrences::Infinite => return Count::Infinite,
            crate::seq::Occurrences::Finite(_) => match &tail.schedule {
                EpSeq::Periodic { prefix, .. } => {
                    for slot in prefix {
                        total += slot.iter().filter(|e| e.source == v).count() as u64;
                    }
                }
                EpSeq::FiniteSupport(map) => {
                    for slot in map.values() {
                        total += slot.iter().filter(|e| e.source == v).count() as u64;
                    }
                }
            },
        }
    }
    Count::Finite(total)
}

/// Canonical shape of a schedule under a vertex renaming: position-wise
/// sorted source lists, normalized as an eventually periodic sequence.
fn schedule_shape(
    schedule: &Schedule,
    rename: &dyn Fn(&str) -> String,
) -> EpSeq<Vec<String>> {
    let map_slot = |slot: &Vec<Entry>| -> Vec<String> {
        let mut sources: Vec<String> = slot.iter().map(|e| rename(&e.source)).collect();
        sources.sort();
        sources
    };
    let raw = match schedule {
        EpSeq::Periodic { prefix, cycle } => EpSeq::Periodic {
            prefix: prefix.iter().map(map_slot).collect(),
            cycle: cycle.iter().map(map_slot).collect(),
        },
        EpSeq::FiniteSupport(m) => {
            EpSeq::FiniteSupport(m.iter().map(|(k, v)| (*k, map_slot(v))).collect())
        }
    };
    raw.normalized_with(|slot| slot.is_empty())
}

/// Searches for an isomorphism of the underlying graphs by brute force over
/// core vertex bijections (pruned by degree signatures), comparing per-pair
/// edge cardinalities and matching tails at corresponding attach vertices by
/// schedule shape.
pub fn iso_check(g1: &PresentedGraph, g2: &PresentedGraph, bound: usize) -> IsoOutcome {
    let v1: Vec<&String> = g1.core_vertices().collect();
    let v2: Vec<&String> = g2.core_vertices().collect();
    if v1.len() != v2.len() {
        return IsoOutcome::NotIsomorphic;
    }
    if v1.len() > bound {
        return IsoOutcome::BoundExceeded {
            core_size: v1.len(),
            bound,
        };
    }

    let signature = |g: &PresentedGraph, v: &str| -> (Degree, Count, usize) {
        let deg = g.in_degree(&VertexRef::core(v.to_string())).unwrap();
        let tails = g.tails().filter(|(_, t)| t.attach == v).count();
        (deg, out_count(g, v), tails)
    };
    let deg_key = |d: Degree| match d {
        Degree::Infinite => (u64::MAX, 0),
        Degree::Finite(n) => (n, 1),
    };
    let sig1: Vec<_> = v1.iter().map(|v| signature(g1, v)).collect();
    let sig2: Vec<_> = v2.iter().map(|v| signature(g2, v)).collect();
    {
        let mut k1: Vec<_> = sig1.iter().map(|(d, o, t)| (deg_key(*d), *o, *t)).collect();
        let mut k2: Vec<_> = sig2.iter().map(|(d, o, t)| (deg_key(*d), *o, *t)).collect();
        k1.sort();
        k2.sort();
        if k1 != k2 {
            return IsoOutcome::NotIsomorphic;
        }
    }

    let n = v1.len();
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    if let Some(tail_map) = assign(g1, g2, &v1, &v2, &sig1, &sig2, &mut assignment, &mut used, 0) {
        let vertex_map = assignment
            .iter()
            .enumerate()
            .map(|(i, j)| (v1[i].clone(), v2[j.unwrap()].clone()))
            .collect();
        return IsoOutcome::Isomorphic(Isomorphism {
            vertex_map,
            tail_map,
        });
    }
    IsoOutcome::NotIsomorphic
}

#[allow(clippy::too_many_arguments)]
fn assign(
    g1: &PresentedGraph,
    g2: &PresentedGraph,
    v1: &[&String],
    v2: &[&String],
    sig1: &[(Degree, Count, usize)],
    sig2: &[(Degree, Count, usize)],
    assignment: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    i: usize,
) -> Option<BTreeMap<String, String>> {
    if i == v1.len() {
        return check_full(g1, g2, v1, v2, assignment);
    }
    for j in 0..v2.len() {
        if used[j] || sig1[i] != sig2[j] {
            continue;
        }
        // Edge counts against already assigned vertices must agree.
        let consistent = (0..i).all(|k| {
            let jk = assignment[k].unwrap();
            pair_count(g1, v1[i], v1[k]) == pair_count(g2, v2[j], v2[jk])
                && pair_count(g1, v1[k], v1[i]) == pair_count(g2, v2[jk], v2[j])
        }) && pair_count(g1, v1[i], v1[i]) == pair_count(g2, v2[j], v2[j]);
        if !consistent {
            continue;
        }
        assignment[i] = Some(j);
        used[j] = true;
        if let Some(found) = assign(g1, g2, v1, v2, sig1, sig2, assignment, used, i + 1) {
            return Some(found);
        }
        assignment[i] = None;
        used[j] = false;
    }
    None
}

fn check_full(
    g1: &PresentedGraph,
    g2: &PresentedGraph,
    v1: &[&String],
    v2: &[&String],
    assignment: &[Option<usize>],
) -> Option<BTreeMap<String, String>> {
    let rename: BTreeMap<&str, &str> = v1
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), v2[assignment[i].unwrap()].as_str()))
        .collect();
    let apply = |v: &str| -> String { rename.get(v).map(|s| s.to_string()).unwrap_or_default() };

    // Tails must match per attach vertex, by schedule shape. Matching is
    // greedy, which is enough because candidates are compared by equality.
    let mut tail_map = BTreeMap::new();
    let mut pool: Vec<(String, String, EpSeq<Vec<String>>)> = g2
        .tails()
        .map(|(id, t)| {
            (
                id.clone(),
                t.attach.clone(),
                schedule_shape(&t.schedule, &|s: &str| s.to_string()),
            )
        })
        .collect();
    for (id, t) in g1.tails() {
        let attach = apply(&t.attach);
        let shape = schedule_shape(&t.schedule, &|s: &str| apply(s));
        let hit = pool
            .iter()
            .position(|(_, a, s)| *a == attach && *s == shape)?;
        let (other, _, _) = pool.swap_remove(hit);
        tail_map.insert(id.clone(), other);
    }
    if !pool.is_empty() {
        return None;
    }
    Some(tail_map)
}
