//! The commutative algebra of cylinder indicator projections, with exact
//! coefficients.
//!
//! An element is a finite sum `Σ b_μ · P_μ`, where `P_μ` stands for the
//! indicator of `Z(μ)` restricted to boundary paths. Products follow the
//! range-projection rule `P_μ · P_ν = P_(longer)` when one stem extends the
//! other and `0` otherwise, which makes the span closed under
//! multiplication. The orthogonalized q-projections
//! `q_μ^F = P_μ · Π (P_μ − P_μμ')` diagonalize every element supported on a
//! finite stem set `F`, so equality, vanishing and the norm are decided
//! exactly: the norm is the largest coefficient modulus over the
//! non-vanishing q's, and evaluation at a boundary path is a character.
//!
//! Coefficients are Gaussian rationals; norms are handled through squared
//! moduli so that every comparison stays in exact arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{EdgeRef, PresentedGraph, VertexRef};
use crate::path::{boundary_avoiding, common_extension, BoundaryPath, InfPathSpec, Path};
use crate::path_maps::{phi, phi_inv, CollapseMap};

/// An exact Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|²`, exact.
    pub fn modulus_squared(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        Scalar {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// A finite formal sum `Σ b_μ · P_μ` over one graph. Zero coefficients are
/// never stored.
#[derive(Clone, Debug)]
pub struct DiagonalElement {
    graph: Arc<PresentedGraph>,
    terms: BTreeMap<Path, Scalar>,
}

impl DiagonalElement {
    pub fn zero(graph: Arc<PresentedGraph>) -> Self {
        DiagonalElement {
            graph,
            terms: BTreeMap::new(),
        }
    }

    /// The projection `P_μ`.
    pub fn projection(graph: Arc<PresentedGraph>, stem: Path) -> Result<Self> {
        stem.check_in(&graph)?;
        let mut terms = BTreeMap::new();
        terms.insert(stem, Scalar::one());
        Ok(DiagonalElement { graph, terms })
    }

    pub fn from_terms(
        graph: Arc<PresentedGraph>,
        terms: impl IntoIterator<Item = (Path, Scalar)>,
    ) -> Result<Self> {
        let mut elem = DiagonalElement::zero(graph);
        for (p, c) in terms {
            p.check_in(&elem.graph)?;
            elem.add_term(p, c);
        }
        Ok(elem)
    }

    pub fn graph(&self) -> &Arc<PresentedGraph> {
        &self.graph
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> Vec<Path> {
        self.terms.keys().cloned().collect()
    }

    fn add_term(&mut self, p: Path, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&p) {
            Some(existing) => {
                *existing = existing.add(&c);
                if existing.is_zero() {
                    self.terms.remove(&p);
                }
            }
            None => {
                self.terms.insert(p, c);
            }
        }
    }

    fn same_graph(&self, other: &DiagonalElement) -> Result<()> {
        if Arc::ptr_eq(&self.graph, &other.graph) || *self.graph == *other.graph {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    pub fn add(&self, other: &DiagonalElement) -> Result<DiagonalElement> {
        self.same_graph(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> DiagonalElement {
        let mut out = DiagonalElement::zero(self.graph.clone());
        for (p, b) in &self.terms {
            out.add_term(p.clone(), b.mul(c));
        }
        out
    }

    pub fn sub(&self, other: &DiagonalElement) -> Result<DiagonalElement> {
        self.add(&other.scale(&Scalar::from_integer(-1)))
    }

    /// Bilinear extension of the range-projection product rule:
    /// `P_μ · P_ν` is `P` of the longer stem when the stems nest, `0`
    /// otherwise.
    pub fn multiply(&self, other: &DiagonalElement) -> Result<DiagonalElement> {
        self.same_graph(other)?;
        let mut out = DiagonalElement::zero(self.graph.clone());
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                if p.range() != q.range() {
                    continue;
                }
                if let Some(longer) = common_extension(p, q)? {
                    out.add_term(longer, a.mul(b));
                }
            }
        }
        Ok(out)
    }

    /// Coefficient-wise conjugate (projections are self-adjoint).
    pub fn adjoint(&self) -> DiagonalElement {
        let mut out = DiagonalElement::zero(self.graph.clone());
        for (p, c) in &self.terms {
            out.add_term(p.clone(), c.conj());
        }
        out
    }

    /// Evaluation of the underlying function at a boundary path:
    /// `Σ { b_μ : x ∈ Z(μ) }`.
    pub fn eval(&self, x: &BoundaryPath) -> Result<Scalar> {
        x.check_in(&self.graph)?;
        let mut acc = Scalar::zero();
        for (p, c) in &self.terms {
            if x.starts_with(p) {
                acc = acc.add(c);
            }
        }
        Ok(acc)
    }

    /// Exact zero test through the q-basis: the element vanishes iff every
    /// q-coefficient over a non-vanishing q-projection is zero.
    pub fn is_zero_element(&self) -> Result<bool> {
        let fset = self.support();
        for (stem, coeff) in q_decompose_over(self, &fset)? {
            if !coeff.is_zero() && q_is_nonzero(&self.graph, &fset, &stem)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &DiagonalElement) -> Result<bool> {
        self.sub(other)?.is_zero_element()
    }

    /// `‖a‖²`: the largest squared coefficient modulus over non-vanishing
    /// q-projections of the support.
    pub fn norm_squared(&self) -> Result<BigRational> {
        let fset = self.support();
        let mut best = BigRational::zero();
        for (stem, coeff) in q_decompose_over(self, &fset)? {
            if q_is_nonzero(&self.graph, &fset, &stem)? {
                let m = coeff.modulus_squared();
                if m > best {
                    best = m;
                }
            }
        }
        Ok(best)
    }
}

impl fmt::Display for DiagonalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, c)| format!("({c})*P({p})"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The orthogonalized projection `q_μ^F = P_μ · Π_{μμ' ∈ F\{μ}} (P_μ −
/// P_μμ')`, expanded into an element by the product rule.
pub fn q_projection(
    graph: &Arc<PresentedGraph>,
    fset: &[Path],
    mu: &Path,
) -> Result<DiagonalElement> {
    if !fset.contains(mu) {
        return Err(Error::Precondition(format!("`{mu}` is not in the set")));
    }
    let p_mu = DiagonalElement::projection(graph.clone(), mu.clone())?;
    let mut acc = p_mu.clone();
    for nu in fset {
        if nu != mu && mu.is_prefix_of(nu) {
            let p_nu = DiagonalElement::projection(graph.clone(), nu.clone())?;
            acc = acc.sub(&acc.multiply(&p_nu)?)?;
        }
    }
    Ok(acc)
}

/// Whether `q_μ^F ≠ 0`: some boundary path passes through `μ` while avoiding
/// every proper extension of `μ` inside `F`.
pub fn q_is_nonzero(graph: &Arc<PresentedGraph>, fset: &[Path], mu: &Path) -> Result<bool> {
    Ok(q_nonzero_witness(graph, fset, mu)?.is_some())
}

/// A concrete boundary path witnessing `q_μ^F ≠ 0`, when one exists.
pub fn q_nonzero_witness(
    graph: &Arc<PresentedGraph>,
    fset: &[Path],
    mu: &Path,
) -> Result<Option<BoundaryPath>> {
    let src = mu.source(graph)?;
    let forbidden: Vec<Vec<EdgeRef>> = fset
        .iter()
        .filter(|nu| *nu != mu && mu.is_prefix_of(nu))
        .map(|nu| nu.edges()[mu.edges().len()..].to_vec())
        .collect();
    match boundary_avoiding(graph, &src, &forbidden)? {
        None => Ok(None),
        Some(rest) => Ok(Some(rest.prepend(graph, mu)?)),
    }
}

/// Coefficients of an element over the q-basis of a stem set containing its
/// support: `c_ν = Σ { b_μ : ν ∈ Z(μ) }`.
pub fn q_decompose_over(
    a: &DiagonalElement,
    fset: &[Path],
) -> Result<Vec<(Path, Scalar)>> {
    let mut out = Vec::new();
    for nu in fset {
        let mut c = Scalar::zero();
        for (mu, b) in a.terms() {
            if mu.is_prefix_of(nu) {
                c = c.add(b);
            }
        }
        out.push((nu.clone(), c));
    }
    Ok(out)
}

/// q-coefficients of `a` over its own support.
pub fn q_decompose(a: &DiagonalElement) -> Result<Vec<(Path, Scalar)>> {
    q_decompose_over(a, &a.support())
}

/// A character of the algebra: evaluation at a boundary path.
#[derive(Clone, Debug)]
pub struct Character {
    graph: Arc<PresentedGraph>,
    point: BoundaryPath,
}

impl Character {
    pub fn new(graph: Arc<PresentedGraph>, point: BoundaryPath) -> Result<Self> {
        point.check_in(&graph)?;
        Ok(Character { graph, point })
    }

    pub fn point(&self) -> &BoundaryPath {
        &self.point
    }

    pub fn eval(&self, a: &DiagonalElement) -> Result<Scalar> {
        if *a.graph().as_ref() != *self.graph.as_ref() {
            return Err(Error::GraphMismatch);
        }
        a.eval(&self.point)
    }
}

/// A consistent family of path prefixes, one per length, either stopping at
/// a path with singular source or continuing as a represented infinite
/// path. This is the data from which [`character_to_path`] reconstructs the
/// boundary path realizing a character.
#[derive(Clone, Debug)]
pub enum PrefixFamily {
    /// `family[k]` has length `k`, starting from the length-0 path.
    Terminating(Vec<Path>),
    Extending(InfPathSpec),
}

/// Rebuilds the boundary path from a consistent prefix family: each prefix
/// must extend the previous one by a single edge, and a terminating family
/// must stop at a singular source.
pub fn character_to_path(g: &PresentedGraph, family: &PrefixFamily) -> Result<BoundaryPath> {
    match family {
        PrefixFamily::Extending(spec) => Ok(BoundaryPath::Infinite(spec.clone())),
        PrefixFamily::Terminating(prefixes) => {
            let first = prefixes
                .first()
                .ok_or_else(|| Error::BadPrefixFamily("empty family".into()))?;
            if !first.is_empty() {
                return Err(Error::BadPrefixFamily(format!(
                    "family must start at a vertex, got `{first}`"
                )));
            }
            for (k, pair) in prefixes.windows(2).enumerate() {
                if pair[1].len() != k as u64 + 1 || !pair[0].is_prefix_of(&pair[1]) {
                    return Err(Error::BadPrefixFamily(format!(
                        "`{}` does not extend `{}` by one edge",
                        pair[1], pair[0]
                    )));
                }
            }
            let last = prefixes.last().unwrap();
            last.check_in(g)?;
            let bp = BoundaryPath::Finite(last.clone());
            bp.check_in(g).map_err(|_| {
                Error::BadPrefixFamily(format!(
                    "family stops at `{last}` whose source is not singular"
                ))
            })?;
            Ok(bp)
        }
    }
}

/// Compression by the sum of surviving vertex projections: `p · P_μ · p` is
/// `P_μ` when the range of `μ` survives the collapse and `0` otherwise.
pub fn corner_compress(
    m: &CollapseMap,
    original: &Arc<PresentedGraph>,
    mu: &Path,
) -> Result<DiagonalElement> {
    mu.check_in(original)?;
    if m.survives(mu.range()) {
        DiagonalElement::projection(original.clone(), mu.clone())
    } else {
        Ok(DiagonalElement::zero(original.clone()))
    }
}

/// The isomorphism onto the corner, on the diagonal: `P_μ ↦ P_{φ⁻¹(μ)}`.
pub fn pi_map(
    m: &CollapseMap,
    original: &Arc<PresentedGraph>,
    a: &DiagonalElement,
) -> Result<DiagonalElement> {
    if *a.graph().as_ref() != *m.collapsed() {
        return Err(Error::GraphMismatch);
    }
    let mut out = DiagonalElement::zero(original.clone());
    for (p, c) in a.terms() {
        out.add_term(phi_inv(m, p)?, c.clone());
    }
    Ok(out)
}

/// Expresses the compression `p · P_μ · p` of a path of the original graph
/// inside the image of the collapsed graph's diagonal.
///
/// When `s(μ)` survives, `p P_μ p = P_μ` is `π(P_{φ(μ)})`, the base case.
/// When `μ` ends inside a collapsed tail, its last edge is a step `t#n` and
/// splitting it off gives the recursion
/// `p P_μ p = p P_μ' p − Σ p P_μ'e p` over the entries `e` at position
/// `n−1`, whose terms all end at surviving sources; the recursion
/// terminates because the tail depth strictly decreases.
pub fn pi_inverse_reduce(
    m: &CollapseMap,
    collapsed: &Arc<PresentedGraph>,
    mu: &Path,
) -> Result<DiagonalElement> {
    if *collapsed.as_ref() != *m.collapsed() {
        return Err(Error::GraphMismatch);
    }
    mu.check_in(m.original())?;
    if !m.survives(mu.range()) {
        return Err(Error::RangeNotSurviving(mu.range().to_string()));
    }
    let src = mu.source(m.original())?;
    if m.survives(&src) {
        return DiagonalElement::projection(collapsed.clone(), phi(m, mu)?);
    }
    let VertexRef::Tail { tail, index: n } = &src else {
        unreachable!("non-surviving vertices are tail vertices")
    };
    debug_assert!(matches!(
        mu.edges().last(),
        Some(EdgeRef::Step { .. })
    ));
    let shorter = mu.prefix(mu.len() - 1);
    let mut acc = pi_inverse_reduce(m, collapsed, &shorter)?;
    // Entries at position n−1 are the other edges into s(μ'); at the attach
    // vertex (n = 1) there are none.
    if *n >= 2 {
        for entry in m.original().entries_at(tail, n - 1) {
            let with_entry = shorter.extended(
                m.original(),
                EdgeRef::entry(tail.clone(), n - 1, entry.label),
            )?;
            let term = pi_inverse_reduce(m, collapsed, &with_entry)?;
            acc = acc.sub(&term)?;
        }
    }
    Ok(acc)
}

/// The element-level intertwining check: evaluating `P_μ` at the image of
/// `x` agrees with evaluating `π(P_μ)` at `x` itself.
pub fn diagram_check(
    m: &CollapseMap,
    original: &Arc<PresentedGraph>,
    collapsed: &Arc<PresentedGraph>,
    x: &InfPathSpec,
    mu: &Path,
) -> Result<bool> {
    let p_mu = DiagonalElement::projection(collapsed.clone(), mu.clone())?;
    let left = p_mu.eval(&crate::path_maps::phi_inf(m, x)?)?;
    let right = pi_map(m, original, &p_mu)?.eval(&BoundaryPath::Infinite(x.clone()))?;
    Ok(left == right)
}

/// Pointwise agreement of [`pi_inverse_reduce`] and [`corner_compress`] at a
/// point of the original graph's boundary with surviving range.
pub fn reduction_matches_compression(
    m: &CollapseMap,
    original: &Arc<PresentedGraph>,
    collapsed: &Arc<PresentedGraph>,
    mu: &Path,
    x: &InfPathSpec,
) -> Result<bool> {
    let compressed = corner_compress(m, original, mu)?;
    let reduced = pi_map(m, original, &pi_inverse_reduce(m, collapsed, mu)?)?;
    let at = BoundaryPath::Infinite(x.clone());
    Ok(compressed.eval(&at)? == reduced.eval(&at)?)
}

/// Sanity check used by tests and the verification driver: the projections
/// `{P_ν : ν ∈ vE^{≤n}}` sum to `P_v` as functions on the boundary.
pub fn vertex_resolution(
    graph: &Arc<PresentedGraph>,
    v: &VertexRef,
    paths: &[Path],
) -> Result<DiagonalElement> {
    let mut acc = DiagonalElement::zero(graph.clone());
    for p in paths {
        acc = acc.add(&DiagonalElement::projection(graph.clone(), p.clone())?)?;
    }
    let p_v = DiagonalElement::projection(graph.clone(), Path::at(v.clone()))?;
    p_v.sub(&acc)
}
