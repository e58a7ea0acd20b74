//! The graph file format, path and element literals, and DOT output.
//!
//! # Graph files
//!
//! ```text
//! # comment
//! vertices:
//!   v w
//! edges:
//!   nu1 u v                      # id source range
//! families:
//!   e v prefix=[] cycle=[w]      # id range, then the source pattern
//! tails:
//!   tv v entries: prefix=[] cycle=[[e:w]]
//!   tw w entries: support={}
//! ```
//!
//! A schedule slot `[a:u b:w]` lists entries `label:source`; `support={…}`
//! maps positions to slots and is absent elsewhere. The printer emits the
//! canonical form of this grammar and `parse(print(g)) == g`.
//!
//! # Path literals
//!
//! Edges are written from the range end, separated by dots: `nu1.g.f`.
//! Generated edges are `e[3]` (family edge or schedule entry) and `tv#2`
//! (tail step); `tv[2]` names a tail vertex. A literal is a vertex, a
//! finite path, an eventually periodic path `prefix~(cycle)`, or a
//! tail-absorbed path `prefix@tail`.
//!
//! # Element literals
//!
//! `1*P(v) - 1*P(nu1.nu2)`, `(1+2i)*P(e[1]) + 1/2*P(v)`, `0`. Coefficients
//! are Gaussian rationals and may be parenthesized.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cylinder::Point;
use crate::diagonal::{DiagonalElement, Scalar};
use crate::error::{Error, Result};
use crate::graph::{Entry, PresentedGraph, Schedule, VertexRef};
use crate::path::{BoundaryPath, InfPathSpec, Path};
use crate::seq::EpSeq;
use crate::EdgeRef;

// ---------------------------------------------------------------------------
// tokenizing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Eq,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '[' => {
                chars.next();
                tokens.push(Token::LBracket);
            }
            ']' => {
                chars.next();
                tokens.push(Token::RBracket);
            }
            '{' => {
                chars.next();
                tokens.push(Token::LBrace);
            }
            '}' => {
                chars.next();
                tokens.push(Token::RBrace);
            }
            ':' => {
                chars.next();
                tokens.push(Token::Colon);
            }
            '=' => {
                chars.next();
                tokens.push(Token::Eq);
            }
            c if is_ident_char(c) => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if is_ident_char(c) {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Ident(ident));
            }
            other => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// graph files
// ---------------------------------------------------------------------------

struct LineParser<'a> {
    tokens: &'a [Token],
    at: usize,
    lineno: usize,
}

impl<'a> LineParser<'a> {
    fn new(tokens: &'a [Token], lineno: usize) -> Self {
        LineParser {
            tokens,
            at: 0,
            lineno,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.lineno,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.next() {
            Some(found) if found == t => Ok(()),
            other => Err(Error::Parse {
                line: self.lineno,
                msg: format!("expected {t:?}, found {other:?}"),
            }),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.next() {
            Some(Token::Ident(s)) => Ok(s),
            other => Err(Error::Parse {
                line: self.lineno,
                msg: format!("expected identifier, found {other:?}"),
            }),
        }
    }

    fn number(&mut self) -> Result<u64> {
        let s = self.ident()?;
        s.parse::<u64>().map_err(|_| Error::Parse {
            line: self.lineno,
            msg: format!("expected number, found `{s}`"),
        })
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let s = self.ident()?;
        if s == kw {
            self.expect(Token::Eq)
        } else {
            self.err(format!("expected `{kw}=`, found `{s}`"))
        }
    }

    fn done(&self) -> bool {
        self.at == self.tokens.len()
    }

    /// `[item item …]` with items parsed by `f`.
    fn bracket_list<T>(&mut self, mut f: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect(Token::LBracket)?;
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some(Token::RBracket) => {
                    self.next();
                    return Ok(items);
                }
                None => return self.err("unterminated `[`"),
                _ => items.push(f(self)?),
            }
        }
    }

    fn entry(&mut self) -> Result<Entry> {
        let label = self.ident()?;
        self.expect(Token::Colon)?;
        let source = self.ident()?;
        Ok(Entry { label, source })
    }

    fn slot(&mut self) -> Result<Vec<Entry>> {
        self.bracket_list(|p| p.entry())
    }

    fn schedule(&mut self) -> Result<Schedule> {
        match self.peek() {
            Some(Token::Ident(kw)) if kw == "prefix" => {
                self.keyword("prefix")?;
                let prefix = self.bracket_list(|p| p.slot())?;
                self.keyword("cycle")?;
                let cycle = self.bracket_list(|p| p.slot())?;
                if cycle.is_empty() {
                    self.err("tail schedule cycle may not be empty; use support={} instead")
                } else {
                    Ok(EpSeq::Periodic { prefix, cycle })
                }
            }
            Some(Token::Ident(kw)) if kw == "support" => {
                self.keyword("support")?;
                self.expect(Token::LBrace)?;
                let mut map = BTreeMap::new();
                loop {
                    match self.peek() {
                        Some(Token::RBrace) => {
                            self.next();
                            return Ok(EpSeq::FiniteSupport(map));
                        }
                        None => return self.err("unterminated `{`"),
                        _ => {
                            let pos = self.number()?;
                            self.expect(Token::Colon)?;
                            let slot = self.slot()?;
                            if map.insert(pos, slot).is_some() {
                                return self.err(format!("position {pos} listed twice"));
                            }
                        }
                    }
                }
            }
            other => self.err(format!("expected `prefix=` or `support=`, found {other:?}")),
        }
    }
}

/// Parses the graph file format. The graph is checked against
/// [`PresentedGraph::validate`] and rejected when invalid.
pub fn parse_graph(text: &str) -> Result<PresentedGraph> {
    let g = parse_graph_unchecked(text)?;
    g.ensure_valid()?;
    Ok(g)
}

/// Parses without the validity check (used by tests that need to construct
/// deliberately broken graphs from text).
pub fn parse_graph_unchecked(text: &str) -> Result<PresentedGraph> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Vertices,
        Edges,
        Families,
        Tails,
    }
    let mut g = PresentedGraph::new();
    let mut section = Section::None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let tokens = tokenize(line, lineno)?;
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() == 2 && tokens[1] == Token::Colon {
            if let Token::Ident(name) = &tokens[0] {
                section = match name.as_str() {
                    "vertices" => Section::Vertices,
                    "edges" => Section::Edges,
                    "families" => Section::Families,
                    "tails" => Section::Tails,
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("unknown section `{other}`"),
                        })
                    }
                };
                continue;
            }
        }
        let mut p = LineParser::new(&tokens, lineno);
        let wrap = |e: Error, lineno: usize| match e {
            Error::Parse { .. } => e,
            other => Error::Parse {
                line: lineno,
                msg: other.to_string(),
            },
        };
        match section {
            Section::None => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "content before any section header".into(),
                })
            }
            Section::Vertices => {
                while !p.done() {
                    let v = p.ident()?;
                    g.add_vertex(v).map_err(|e| wrap(e, lineno))?;
                }
            }
            Section::Edges => {
                let id = p.ident()?;
                let src = p.ident()?;
                let rng = p.ident()?;
                if !p.done() {
                    return p.err("trailing tokens after edge");
                }
                g.add_edge(id, src, rng).map_err(|e| wrap(e, lineno))?;
            }
            Section::Families => {
                let id = p.ident()?;
                let range = p.ident()?;
                p.keyword("prefix")?;
                let prefix = p.bracket_list(|p| p.ident())?;
                p.keyword("cycle")?;
                let cycle = p.bracket_list(|p| p.ident())?;
                if !p.done() {
                    return p.err("trailing tokens after family");
                }
                g.add_family(id, range, EpSeq::Periodic { prefix, cycle })
                    .map_err(|e| wrap(e, lineno))?;
            }
            Section::Tails => {
                let id = p.ident()?;
                let attach = p.ident()?;
                let kw = p.ident()?;
                if kw != "entries" {
                    return p.err(format!("expected `entries:`, found `{kw}`"));
                }
                p.expect(Token::Colon)?;
                let schedule = p.schedule()?;
                if !p.done() {
                    return p.err("trailing tokens after tail");
                }
                g.add_tail(id, attach, schedule).map_err(|e| wrap(e, lineno))?;
            }
        }
    }
    Ok(g)
}

/// Prints a graph in the canonical form of the file grammar.
pub fn print_graph(g: &PresentedGraph) -> String {
    let mut out = String::new();
    let vertices: Vec<&String> = g.core_vertices().collect();
    if !vertices.is_empty() {
        out.push_str("vertices:\n");
        let names: Vec<&str> = vertices.iter().map(|v| v.as_str()).collect();
        let _ = writeln!(out, "  {}", names.join(" "));
    }
    if g.core_edges().next().is_some() {
        out.push_str("edges:\n");
        for (id, (src, rng)) in g.core_edges() {
            let _ = writeln!(out, "  {id} {src} {rng}");
        }
    }
    if g.families().next().is_some() {
        out.push_str("families:\n");
        for (id, fam) in g.families() {
            let (prefix, cycle) = match &fam.sources {
                EpSeq::Periodic { prefix, cycle } => (prefix.clone(), cycle.clone()),
                EpSeq::FiniteSupport(_) => (Vec::new(), Vec::new()),
            };
            let _ = writeln!(
                out,
                "  {id} {} prefix=[{}] cycle=[{}]",
                fam.range,
                prefix.join(" "),
                cycle.join(" ")
            );
        }
    }
    if g.tails().next().is_some() {
        out.push_str("tails:\n");
        for (id, tail) in g.tails() {
            let _ = writeln!(
                out,
                "  {id} {} entries: {}",
                tail.attach,
                print_schedule(&tail.schedule)
            );
        }
    }
    out
}

fn print_slot(slot: &[Entry]) -> String {
    let parts: Vec<String> = slot.iter().map(|e| format!("{}:{}", e.label, e.source)).collect();
    format!("[{}]", parts.join(" "))
}

fn print_schedule(s: &Schedule) -> String {
    match s {
        EpSeq::Periodic { prefix, cycle } => {
            let p: Vec<String> = prefix.iter().map(|s| print_slot(s)).collect();
            let c: Vec<String> = cycle.iter().map(|s| print_slot(s)).collect();
            format!("prefix=[{}] cycle=[{}]", p.join(" "), c.join(" "))
        }
        EpSeq::FiniteSupport(map) => {
            let parts: Vec<String> = map
                .iter()
                .map(|(pos, slot)| format!("{pos}:{}", print_slot(slot)))
                .collect();
            format!("support={{{}}}", parts.join(" "))
        }
    }
}

// ---------------------------------------------------------------------------
// path literals
// ---------------------------------------------------------------------------

/// Resolves `name`, `name[index]` or `name#index` as an edge of `g`.
fn resolve_edge(g: &PresentedGraph, name: &str, index: Option<(char, u64)>) -> Result<EdgeRef> {
    let edge = match index {
        None => EdgeRef::core(name),
        Some(('#', i)) => EdgeRef::step(name, i),
        Some(('[', i)) => {
            if g.families().any(|(f, _)| f == name) {
                EdgeRef::family(name, i)
            } else {
                // An entry label at the given position of some tail.
                let mut found = None;
                for (tid, _) in g.tails() {
                    if g.entries_at(tid, i).iter().any(|e| e.label == name) {
                        found = Some(EdgeRef::entry(tid.clone(), i, name));
                        break;
                    }
                }
                found.ok_or_else(|| Error::UnknownEdge(format!("{name}[{i}]")))?
            }
        }
        Some((c, _)) => return Err(Error::BadSpec(format!("unexpected index marker `{c}`"))),
    };
    if g.has_edge(&edge) {
        Ok(edge)
    } else {
        Err(Error::UnknownEdge(edge.to_string()))
    }
}

/// Parses `v` or `t[i]` as a vertex of `g`.
pub fn parse_vertex(g: &PresentedGraph, text: &str) -> Result<VertexRef> {
    let text = text.trim();
    let v = if let Some((name, rest)) = text.split_once('[') {
        let index = rest
            .strip_suffix(']')
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| Error::BadSpec(format!("bad vertex literal `{text}`")))?;
        VertexRef::tail(name, index)
    } else {
        VertexRef::core(text)
    };
    if g.has_vertex(&v) {
        Ok(v)
    } else {
        Err(Error::UnknownVertex(v.to_string()))
    }
}

fn split_components(text: &str) -> Vec<&str> {
    if text.is_empty() {
        Vec::new()
    } else {
        text.split('.').collect()
    }
}

fn component_parts(comp: &str) -> Result<(String, Option<(char, u64)>)> {
    let comp = comp.trim();
    if let Some((name, rest)) = comp.split_once('[') {
        let idx = rest
            .strip_suffix(']')
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| Error::BadSpec(format!("bad component `{comp}`")))?;
        return Ok((name.to_string(), Some(('[', idx))));
    }
    if let Some((name, rest)) = comp.split_once('#') {
        let idx = rest
            .parse::<u64>()
            .map_err(|_| Error::BadSpec(format!("bad component `{comp}`")))?;
        return Ok((name.to_string(), Some(('#', idx))));
    }
    if comp.is_empty() || !comp.chars().all(is_ident_char) {
        return Err(Error::BadSpec(format!("bad component `{comp}`")));
    }
    Ok((comp.to_string(), None))
}

/// Parses a finite path literal: a vertex (length 0) or a dotted edge list.
pub fn parse_path(g: &PresentedGraph, text: &str) -> Result<Path> {
    let text = text.trim();
    let comps = split_components(text);
    if comps.len() == 1 {
        let (name, index) = component_parts(comps[0])?;
        // A lone component naming a vertex is the length-0 path there.
        match index {
            None if g.has_core_vertex(&name) => {
                return Ok(Path::at(VertexRef::core(name)));
            }
            Some(('[', i)) if g.tails().any(|(t, _)| *t == name) => {
                return Ok(Path::at(VertexRef::tail(name, i)));
            }
            _ => {}
        }
    }
    let mut edges = Vec::new();
    for comp in comps {
        let (name, index) = component_parts(comp)?;
        edges.push(resolve_edge(g, &name, index)?);
    }
    if edges.is_empty() {
        return Err(Error::BadSpec("empty path literal".into()));
    }
    Path::from_edges(g, edges)
}

/// Parses a point literal: a finite path, `prefix~(cycle)` or `prefix@tail`.
pub fn parse_point(g: &PresentedGraph, text: &str) -> Result<Point> {
    let text = text.trim();
    if let Some((prefix, rest)) = text.split_once("~(") {
        let cycle_text = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::BadSpec(format!("unterminated cycle in `{text}`")))?;
        let prefix = parse_path(g, prefix)?;
        let mut cycle = Vec::new();
        for comp in split_components(cycle_text) {
            let (name, index) = component_parts(comp)?;
            cycle.push(resolve_edge(g, &name, index)?);
        }
        return Ok(Point::Infinite(InfPathSpec::periodic(g, prefix, cycle)?));
    }
    if let Some((prefix, tail)) = text.rsplit_once('@') {
        let prefix = parse_path(g, prefix)?;
        return Ok(Point::Infinite(InfPathSpec::tail_absorbed(
            g,
            prefix,
            tail.trim(),
        )?));
    }
    Ok(Point::Finite(parse_path(g, text)?))
}

/// Parses a point literal and requires an infinite path.
pub fn parse_spec(g: &PresentedGraph, text: &str) -> Result<InfPathSpec> {
    match parse_point(g, text)? {
        Point::Infinite(spec) => Ok(spec),
        Point::Finite(p) => Err(Error::BadSpec(format!(
            "`{p}` is a finite path where an infinite one is required"
        ))),
    }
}

/// Parses a boundary path literal (finite paths are checked to end at a
/// singular vertex).
pub fn parse_boundary(g: &PresentedGraph, text: &str) -> Result<BoundaryPath> {
    let bp = match parse_point(g, text)? {
        Point::Finite(p) => BoundaryPath::Finite(p),
        Point::Infinite(s) => BoundaryPath::Infinite(s),
    };
    bp.check_in(g)?;
    Ok(bp)
}

// ---------------------------------------------------------------------------
// scalar and element literals
// ---------------------------------------------------------------------------

fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::BadSpec(format!("bad rational `{text}`"));
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = text.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// Parses a Gaussian rational: `3`, `-3/2`, `i`, `-i`, `2i`, `1+2i`,
/// `1/2-3/4i`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::BadSpec(format!("bad scalar `{text}`"));
    if text.is_empty() {
        return Err(bad());
    }
    if let Some(imag) = text.strip_suffix('i') {
        // Look for a split point between the real and imaginary parts: a
        // sign that is neither leading nor following '/' or another sign.
        let chars: Vec<char> = imag.chars().collect();
        let mut split = None;
        for (i, c) in chars.iter().enumerate().skip(1) {
            if (*c == '+' || *c == '-') && chars[i - 1] != '/' {
                split = Some(i);
            }
        }
        match split {
            Some(i) => {
                let re = parse_rational(&imag[..i])?;
                let im_text = &imag[i..];
                let im = match im_text {
                    "+" => BigRational::one(),
                    "-" => -BigRational::one(),
                    _ => parse_rational(im_text)?,
                };
                Ok(Scalar::new(re, im))
            }
            None => {
                let im = match imag {
                    "" => BigRational::one(),
                    "-" => -BigRational::one(),
                    "+" => BigRational::one(),
                    _ => parse_rational(imag)?,
                };
                Ok(Scalar::new(BigRational::zero(), im))
            }
        }
    } else {
        Ok(Scalar::new(parse_rational(&text)?, BigRational::zero()))
    }
}

/// Parses an element literal: signed terms `coef*P(path)` (the coefficient
/// optional, possibly parenthesized), or `0`.
pub fn parse_element(g: &Arc<PresentedGraph>, text: &str) -> Result<DiagonalElement> {
    let mut elem = DiagonalElement::zero(g.clone());
    let text = text.trim();
    if text == "0" {
        return Ok(elem);
    }
    // Split into signed terms at top-level +/-.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    let mut negative = false;
    for c in text.chars() {
        match c {
            '(' | '[' => {
                depth += 1;
                current.push(c);
            }
            ')' | ']' => {
                depth -= 1;
                current.push(c);
            }
            '+' | '-' if depth == 0 => {
                if current.trim().is_empty() && c == '-' {
                    negative = !negative;
                } else if current.trim().is_empty() {
                    // leading '+'
                } else {
                    terms.push((negative, std::mem::take(&mut current)));
                    negative = c == '-';
                }
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        terms.push((negative, current));
    }
    for (neg, term) in terms {
        let term = term.trim();
        let (coef_text, path_text) = match term.find("P(") {
            None => return Err(Error::BadSpec(format!("term `{term}` has no P(...)"))),
            Some(i) => {
                let path = term[i + 2..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::BadSpec(format!("unterminated P( in `{term}`")))?;
                (term[..i].trim().trim_end_matches('*').trim(), path)
            }
        };
        let mut coef = if coef_text.is_empty() {
            Scalar::one()
        } else {
            let inner = coef_text
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .unwrap_or(coef_text);
            parse_scalar(inner)?
        };
        if neg {
            coef = coef.neg();
        }
        let path = parse_path(g, path_text)?;
        let single = DiagonalElement::projection(g.clone(), path)?.scale(&coef);
        elem = elem.add(&single)?;
    }
    Ok(elem)
}

// ---------------------------------------------------------------------------
// DOT output
// ---------------------------------------------------------------------------

/// Renders the finite core exactly, the first `tail_levels` vertices of
/// each tail followed by an ellipsis node, and each family as dashed edges
/// from the distinct pattern sources, annotated with the family id.
pub fn to_dot(g: &PresentedGraph, tail_levels: u64) -> String {
    let mut out = String::new();
    out.push_str("digraph G {\n  rankdir=RL;\n");
    for v in g.core_vertices() {
        let _ = writeln!(out, "  \"{v}\";");
    }
    for (id, (src, rng)) in g.core_edges() {
        let _ = writeln!(out, "  \"{src}\" -> \"{rng}\" [label=\"{id}\"];");
    }
    for (id, fam) in g.families() {
        let mut sources = BTreeSet::new();
        match &fam.sources {
            EpSeq::Periodic { prefix, cycle } => {
                sources.extend(prefix.iter().cloned());
                sources.extend(cycle.iter().cloned());
            }
            EpSeq::FiniteSupport(map) => sources.extend(map.values().cloned()),
        }
        for src in sources {
            let _ = writeln!(
                out,
                "  \"{src}\" -> \"{}\" [label=\"{id}[…]\", style=dashed];",
                fam.range
            );
        }
    }
    for (tid, tail) in g.tails() {
        for level in 1..=tail_levels {
            let _ = writeln!(out, "  \"{tid}[{level}]\" [shape=box];");
            let target = if level == 1 {
                tail.attach.clone()
            } else {
                format!("{tid}[{}]", level - 1)
            };
            let _ = writeln!(
                out,
                "  \"{tid}[{level}]\" -> \"{target}\" [label=\"{tid}#{level}\"];"
            );
            for entry in g.entries_at(tid, level) {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{tid}[{level}]\" [label=\"{}[{level}]\"];",
                    entry.source, entry.label
                );
            }
        }
        let _ = writeln!(out, "  \"{tid}…\" [label=\"⋯\", shape=none];");
        let _ = writeln!(
            out,
            "  \"{tid}…\" -> \"{tid}[{tail_levels}]\" [label=\"{tid}#{}\"];",
            tail_levels + 1
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn graph_files_round_trip() {
        for (name, g) in fixtures::all() {
            let text = print_graph(&g);
            let back = parse_graph(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(back, g, "{name} round trip\n{text}");
        }
    }

    #[test]
    fn parse_rejects_invalid_graphs() {
        let text = "edges:\n  a u v\n";
        assert!(matches!(parse_graph(text), Err(Error::InvalidGraph(_))));
        assert!(parse_graph_unchecked(text).is_ok());
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "vertices:\n  v\nedges:\n  broken\n";
        match parse_graph(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn path_literals() {
        let g = fixtures::e_ex();
        assert_eq!(parse_path(&g, "v").unwrap(), Path::at(VertexRef::core("v")));
        let p = parse_path(&g, "nu1.g.f").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.to_string(), "nu1.g.f");

        let point = parse_point(&g, "v~(nu1.g.f)").unwrap();
        assert_eq!(point.to_string(), "v~(nu1.g.f)");

        let g = fixtures::f_omega();
        let point = parse_point(&g, "tv#1.e[1]@tw").unwrap();
        assert_eq!(point.to_string(), "tv#1.e[1]@tw");
        let vertex_path = parse_path(&g, "tv[2]").unwrap();
        assert_eq!(vertex_path, Path::at(VertexRef::tail("tv", 2)));
        let step = parse_path(&g, "tv#2").unwrap();
        assert_eq!(step.edges(), &[EdgeRef::step("tv", 2)]);
    }

    #[test]
    fn display_of_points_parses_back() {
        let g = fixtures::f_omega();
        for text in ["v@tv", "tv#1.e[1]@tw", "tv[3]@tv"] {
            let point = parse_point(&g, text).unwrap();
            let again = parse_point(&g, &point.to_string()).unwrap();
            assert_eq!(point, again, "{text}");
        }
    }

    #[test]
    fn scalar_literals() {
        for (text, re, im) in [
            ("3", 3, 0),
            ("-3", -3, 0),
            ("i", 0, 1),
            ("-i", 0, -1),
            ("2i", 0, 2),
            ("1+2i", 1, 2),
            ("1-2i", 1, -2),
        ] {
            let s = parse_scalar(text).unwrap();
            assert_eq!(s, Scalar::new(
                BigRational::from_integer(BigInt::from(re)),
                BigRational::from_integer(BigInt::from(im)),
            ), "{text}");
        }
        let s = parse_scalar("1/2-3/4i").unwrap();
        assert_eq!(
            s,
            Scalar::new(
                BigRational::new(BigInt::from(1), BigInt::from(2)),
                BigRational::new(BigInt::from(-3), BigInt::from(4)),
            )
        );
        // Display round-trips.
        for text in ["3", "-3/2", "2i", "1+2i", "1-2/3i"] {
            let s = parse_scalar(text).unwrap();
            assert_eq!(parse_scalar(&s.to_string()).unwrap(), s, "{text}");
        }
    }

    #[test]
    fn element_literals() {
        let g = Arc::new(fixtures::e_ex());
        let a = parse_element(&g, "1*P(v) - 1*P(nu1.nu2)").unwrap();
        assert_eq!(a.terms().count(), 2);
        let b = parse_element(&g, &a.to_string()).unwrap();
        assert!(a.sub(&b).unwrap().terms().count() == 0);
        let zero = parse_element(&g, "0").unwrap();
        assert_eq!(zero.terms().count(), 0);
        let c = parse_element(&g, "(1+2i)*P(nu1) + 1/2*P(v)").unwrap();
        assert_eq!(c.terms().count(), 2);
        // - P(v) + P(v) cancels.
        let d = parse_element(&g, "-P(v) + P(v)").unwrap();
        assert_eq!(d.terms().count(), 0);
    }

    #[test]
    fn dot_output_mentions_core_tails_and_families() {
        let g = fixtures::f_omega();
        let dot = to_dot(&g, 3);
        assert!(dot.contains("\"tv[1]\""));
        assert!(dot.contains("⋯"));
        let g = fixtures::e_omega();
        let dot = to_dot(&g, 3);
        assert!(dot.contains("style=dashed"));
    }
}
