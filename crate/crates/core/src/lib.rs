//! Symbolic computation on path spaces of directed graphs.
//!
//! The crate works with *presented* graphs: a finite core of vertices and
//! edges, plus finitely described infinite structure (infinite edge families
//! targeting a single receiver, and infinite tails appended at a vertex).
//! Every predicate on such a presentation is decidable, which makes the
//! following machinery exact:
//!
//! * [`graph`] — presentations, validation, degree and incidence queries;
//! * [`path`] — finite paths, finitely described infinite paths, boundary
//!   paths, enumeration, common extensions and exhaustive sets;
//! * [`cylinder`] — basic open sets `Z(stem \ forbidden)` of the cylinder
//!   topology, membership, intersection, refinement to an edge-complement
//!   basis, and limit extraction from path sequences;
//! * [`desing`] — collapsibility checking (conditions C1–C5), collapsing
//!   tails to infinite families, desingularisation of singular vertices,
//!   and bounded isomorphism checking;
//! * [`path_maps`] — the path correspondence between a graph and its
//!   collapse: segment factorization, the finite and boundary path
//!   bijections, and constructive open-set witnesses in both directions;
//! * [`diagonal`] — the commutative algebra spanned by cylinder indicator
//!   projections with exact Gaussian rational coefficients: products,
//!   orthogonalized q-projections, the norm formula, characters, corner
//!   compression and the intertwining check;
//! * [`textio`] — the graph file format, path and element literals, DOT
//!   output.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything can be shared freely across threads.

pub mod cylinder;
pub mod desing;
pub mod diagonal;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod path;
pub mod path_maps;
pub mod random;
pub mod seq;
pub mod textio;

pub use error::{Error, Result};
pub use graph::{Degree, EdgeRef, PresentedGraph, VertexRef};
pub use path::{BoundaryPath, InfPathSpec, Path};
