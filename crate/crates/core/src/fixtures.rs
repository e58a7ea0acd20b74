//! Small example graphs used by the documentation, the test suites and the
//! verification driver.

use crate::graph::{Entry, PresentedGraph};
use crate::seq::EpSeq;

/// A single isolated vertex `v`.
pub fn e_pt() -> PresentedGraph {
    let mut g = PresentedGraph::new();
    g.add_vertex("v").unwrap();
    debug_assert!(g.validate().is_valid());
    g
}

/// Two vertices `v`, `w` and one infinite family `e` of edges from `w` into
/// `v`, making `v` an infinite receiver and `w` a source.
pub fn e_omega() -> PresentedGraph {
    let mut g = PresentedGraph::new();
    g.add_vertex("v").unwrap();
    g.add_vertex("w").unwrap();
    g.add_family("e", "v", EpSeq::constant("w".to_string()))
        .unwrap();
    debug_assert!(g.validate().is_valid());
    g
}

/// Four vertices `v, u, w, b` with edges `nu1: u→v`, `nu2: w→u`, `f: v→b`,
/// `g: b→u`; the only singular vertex is the source `w`, and `nu1.g.f` is
/// the unique simple cycle at `v`.
pub fn e_ex() -> PresentedGraph {
    let mut g = PresentedGraph::new();
    for v in ["v", "u", "w", "b"] {
        g.add_vertex(v).unwrap();
    }
    g.add_edge("nu1", "u", "v").unwrap();
    g.add_edge("nu2", "w", "u").unwrap();
    g.add_edge("f", "v", "b").unwrap();
    g.add_edge("g", "b", "u").unwrap();
    debug_assert!(g.validate().is_valid());
    g
}

/// [`e_ex`] with an entry-free tail `nu` appended at `w`. Collapsing that
/// tail recovers [`e_ex`].
pub fn f_ex() -> PresentedGraph {
    let mut g = e_ex();
    g.add_tail("nu", "w", EpSeq::empty()).unwrap();
    debug_assert!(g.validate().is_valid());
    g
}

/// A desingularisation of [`e_omega`], written out explicitly: a tail `tv`
/// at `v` whose schedule places one entry `e` from `w` at every position,
/// and an entry-free tail `tw` at `w`.
pub fn f_omega() -> PresentedGraph {
    let mut g = PresentedGraph::new();
    g.add_vertex("v").unwrap();
    g.add_vertex("w").unwrap();
    g.add_tail(
        "tv",
        "v",
        EpSeq::Periodic {
            prefix: vec![],
            cycle: vec![vec![Entry::new("e", "w")]],
        },
    )
    .unwrap();
    g.add_tail("tw", "w", EpSeq::empty()).unwrap();
    debug_assert!(g.validate().is_valid());
    g
}

/// All five fixtures with their usual names.
pub fn all() -> Vec<(&'static str, PresentedGraph)> {
    vec![
        ("e_pt", e_pt()),
        ("e_omega", e_omega()),
        ("e_ex", e_ex()),
        ("f_ex", f_ex()),
        ("f_omega", f_omega()),
    ]
}
