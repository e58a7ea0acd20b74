//! Python bindings: graphs, the collapse correspondence and the exact
//! diagonal, driven through the same literals as the CLI.

use std::collections::BTreeSet;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pathspace::cylinder::{member, member_general, refine_to_basic, CylinderBasic, GeneralCylinder};
use pathspace::desing::{
    check_collapsible, check_collapsible_tail, collapse, desingularise, iso_check,
    CollapsibleReport, IsoOutcome, SchedulePolicy,
};
use pathspace::diagonal::{corner_compress, diagram_check, pi_inverse_reduce, pi_map};
use pathspace::graph::PresentedGraph;
use pathspace::path_maps::{
    open_image_witness, open_preimage_witness, phi, phi_inf, phi_inf_inv, phi_inv, CollapseMap,
};
use pathspace::textio;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finitely presented directed graph.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: Arc<PresentedGraph>,
}

impl PyGraph {
    fn wrap(g: PresentedGraph) -> Self {
        PyGraph { inner: Arc::new(g) }
    }
}

#[pymethods]
impl PyGraph {
    /// Validation issues; an empty list means the graph is valid.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .issues
            .iter()
            .map(|i| i.to_string())
            .collect()
    }

    fn is_row_finite(&self) -> bool {
        self.inner.is_row_finite()
    }

    fn vertices(&self) -> Vec<String> {
        self.inner.core_vertices().cloned().collect()
    }

    fn singular_vertices(&self) -> Vec<String> {
        self.inner.singular_vertices().into_iter().collect()
    }

    /// In-degree of a vertex literal; `None` means infinite.
    fn in_degree(&self, vertex: &str) -> PyResult<Option<u64>> {
        let v = textio::parse_vertex(&self.inner, vertex).map_err(err)?;
        match self.inner.in_degree(&v).map_err(err)? {
            pathspace::Degree::Finite(n) => Ok(Some(n)),
            pathspace::Degree::Infinite => Ok(None),
        }
    }

    fn incoming_edges(&self, vertex: &str, k: usize) -> PyResult<Vec<String>> {
        let v = textio::parse_vertex(&self.inner, vertex).map_err(err)?;
        Ok(self
            .inner
            .incoming_edges(&v, k)
            .map_err(err)?
            .iter()
            .map(|e| e.to_string())
            .collect())
    }

    /// Paths of length `n` with the given range, as literals.
    #[pyo3(signature = (range, n, limit = 64))]
    fn paths(&self, range: &str, n: u64, limit: usize) -> PyResult<Vec<String>> {
        let v = textio::parse_vertex(&self.inner, range).map_err(err)?;
        let out = pathspace::path::paths_with_range(&self.inner, &v, n, limit).map_err(err)?;
        Ok(out.items.iter().map(|p| p.to_string()).collect())
    }

    /// Boundary path representatives, as literals.
    #[pyo3(signature = (range, depth = 6, limit = 64))]
    fn boundary(&self, range: &str, depth: u64, limit: usize) -> PyResult<Vec<String>> {
        let v = textio::parse_vertex(&self.inner, range).map_err(err)?;
        let out = pathspace::path::boundary_paths(&self.inner, &v, depth, limit).map_err(err)?;
        Ok(out.items.iter().map(|p| p.to_string()).collect())
    }

    /// Membership of a point in `Z(stem \ forbidden_edges)`.
    #[pyo3(signature = (point, stem, forbid = Vec::new()))]
    fn member(&self, point: &str, stem: &str, forbid: Vec<String>) -> PyResult<bool> {
        let w = textio::parse_point(&self.inner, point).map_err(err)?;
        let stem = textio::parse_path(&self.inner, stem).map_err(err)?;
        let mut forbidden = BTreeSet::new();
        for f in &forbid {
            let p = textio::parse_path(&self.inner, f).map_err(err)?;
            match p.edges() {
                [e] => forbidden.insert(e.clone()),
                _ => return Err(err(format!("`{f}` is not a single edge"))),
            };
        }
        let z = CylinderBasic::new(&self.inner, stem, forbidden).map_err(err)?;
        Ok(member(&w, &z))
    }

    /// Refine `Z(stem \ forbidden_paths)` around a member point; returns the
    /// basic as display text.
    fn refine(&self, stem: &str, forbid_paths: Vec<String>, point: &str) -> PyResult<String> {
        let stem = textio::parse_path(&self.inner, stem).map_err(err)?;
        let mut forbidden = BTreeSet::new();
        for f in &forbid_paths {
            forbidden.insert(textio::parse_path(&self.inner, f).map_err(err)?);
        }
        let z = GeneralCylinder::new(&self.inner, stem, forbidden).map_err(err)?;
        let w = textio::parse_point(&self.inner, point).map_err(err)?;
        if !member_general(&w, &z) {
            return Err(err("point is not in the cylinder"));
        }
        Ok(refine_to_basic(&self.inner, &z, &w).map_err(err)?.to_string())
    }

    /// Conditions C1–C5 for a declared tail, as a dict
    /// `{condition: (passes, witness)}`.
    fn check_collapsible_tail<'py>(
        &self,
        py: Python<'py>,
        tail: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let report = check_collapsible_tail(&self.inner, tail).map_err(err)?;
        report_dict(py, &report)
    }

    /// Conditions C1–C5 for an infinite path literal.
    fn check_collapsible<'py>(
        &self,
        py: Python<'py>,
        path: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let spec = textio::parse_spec(&self.inner, path).map_err(err)?;
        let report = check_collapsible(&self.inner, &spec).map_err(err)?;
        report_dict(py, &report)
    }

    /// Append a tail at every singular vertex; returns the new graph and
    /// the appended tail ids.
    #[pyo3(signature = (per_position = 1))]
    fn desingularise(&self, per_position: u64) -> PyResult<(PyGraph, Vec<String>)> {
        let out = desingularise(&self.inner, &SchedulePolicy::PerPosition(per_position))
            .map_err(err)?;
        Ok((
            PyGraph::wrap(out.graph),
            out.added_tails.into_iter().collect(),
        ))
    }

    /// Collapse the given tails; returns the recorded correspondence.
    fn collapse(&self, tails: Vec<String>) -> PyResult<PyCollapseMap> {
        let set: BTreeSet<String> = tails.into_iter().collect();
        let out = collapse(&self.inner, &set).map_err(err)?;
        Ok(PyCollapseMap {
            inner: Arc::new(out.map),
        })
    }

    /// Search for an isomorphism; returns the vertex map or `None`.
    #[pyo3(signature = (other, bound = 8))]
    fn iso<'py>(
        &self,
        py: Python<'py>,
        other: &PyGraph,
        bound: usize,
    ) -> PyResult<Option<Bound<'py, PyDict>>> {
        match iso_check(&self.inner, &other.inner, bound) {
            IsoOutcome::Isomorphic(iso) => {
                let d = PyDict::new(py);
                for (a, b) in &iso.vertex_map {
                    d.set_item(a, b)?;
                }
                Ok(Some(d))
            }
            IsoOutcome::NotIsomorphic => Ok(None),
            IsoOutcome::BoundExceeded { core_size, bound } => Err(err(format!(
                "undecided: core size {core_size} exceeds bound {bound}"
            ))),
        }
    }

    /// Multiply two element literals; returns the product as a literal.
    fn diag_mul(&self, a: &str, b: &str) -> PyResult<String> {
        let a = textio::parse_element(&self.inner, a).map_err(err)?;
        let b = textio::parse_element(&self.inner, b).map_err(err)?;
        Ok(a.multiply(&b).map_err(err)?.to_string())
    }

    /// The exact squared norm of an element literal, as a rational string.
    fn diag_norm_sq(&self, a: &str) -> PyResult<String> {
        let a = textio::parse_element(&self.inner, a).map_err(err)?;
        Ok(a.norm_squared().map_err(err)?.to_string())
    }

    /// Evaluate an element at a boundary path literal.
    fn diag_eval(&self, x: &str, a: &str) -> PyResult<String> {
        let x = textio::parse_boundary(&self.inner, x).map_err(err)?;
        let a = textio::parse_element(&self.inner, a).map_err(err)?;
        Ok(a.eval(&x).map_err(err)?.to_string())
    }

    /// Whether an element literal is the zero function on the boundary.
    fn diag_is_zero(&self, a: &str) -> PyResult<bool> {
        let a = textio::parse_element(&self.inner, a).map_err(err)?;
        a.is_zero_element().map_err(err)
    }

    fn to_text(&self) -> String {
        textio::print_graph(&self.inner)
    }

    #[pyo3(signature = (tail_levels = 3))]
    fn to_dot(&self, tail_levels: u64) -> String {
        textio::to_dot(&self.inner, tail_levels)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph({} vertices, {} edges, {} families, {} tails)",
            self.inner.core_vertices().count(),
            self.inner.core_edges().count(),
            self.inner.families().count(),
            self.inner.tails().count()
        )
    }
}

fn report_dict<'py>(py: Python<'py>, report: &CollapsibleReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (name, v) in [
        ("C1", &report.c1),
        ("C2", &report.c2),
        ("C3", &report.c3),
        ("C4", &report.c4),
        ("C5", &report.c5),
    ] {
        d.set_item(name, (v.passes, v.witness.clone()))?;
    }
    Ok(d)
}

/// The recorded correspondence of a collapse.
#[pyclass(name = "CollapseMap", frozen)]
struct PyCollapseMap {
    inner: Arc<CollapseMap>,
}

#[pymethods]
impl PyCollapseMap {
    fn original(&self) -> PyGraph {
        PyGraph::wrap(self.inner.original().clone())
    }

    fn collapsed(&self) -> PyGraph {
        PyGraph::wrap(self.inner.collapsed().clone())
    }

    /// Map a finite path literal of the original graph forward.
    fn phi(&self, path: &str) -> PyResult<String> {
        let p = textio::parse_path(self.inner.original(), path).map_err(err)?;
        Ok(phi(&self.inner, &p).map_err(err)?.to_string())
    }

    /// Map a finite path literal of the collapsed graph back.
    fn phi_inv(&self, path: &str) -> PyResult<String> {
        let p = textio::parse_path(self.inner.collapsed(), path).map_err(err)?;
        Ok(phi_inv(&self.inner, &p).map_err(err)?.to_string())
    }

    /// Map an infinite path literal to its boundary image.
    fn phi_inf(&self, path: &str) -> PyResult<String> {
        let spec = textio::parse_spec(self.inner.original(), path).map_err(err)?;
        Ok(phi_inf(&self.inner, &spec).map_err(err)?.to_string())
    }

    /// Map a boundary path literal of the collapsed graph back.
    fn phi_inf_inv(&self, path: &str) -> PyResult<String> {
        let x = textio::parse_boundary(self.inner.collapsed(), path).map_err(err)?;
        Ok(phi_inf_inv(&self.inner, &x).map_err(err)?.to_string())
    }

    /// Openness witness for the image of `Z(stem \ forbid)` around a point.
    #[pyo3(signature = (stem, point, forbid = Vec::new()))]
    fn witness_image(&self, stem: &str, point: &str, forbid: Vec<String>) -> PyResult<String> {
        let e = self.inner.collapsed();
        let stem = textio::parse_path(e, stem).map_err(err)?;
        let mut forbidden = BTreeSet::new();
        for f in &forbid {
            let p = textio::parse_path(e, f).map_err(err)?;
            match p.edges() {
                [edge] => forbidden.insert(edge.clone()),
                _ => return Err(err(format!("`{f}` is not a single edge"))),
            };
        }
        let z = CylinderBasic::new(e, stem, forbidden).map_err(err)?;
        let lam = textio::parse_spec(self.inner.original(), point).map_err(err)?;
        Ok(open_image_witness(&self.inner, &z, &lam)
            .map_err(err)?
            .to_string())
    }

    /// Openness witness for the preimage of `Z(stem)` around a boundary
    /// point of the collapsed graph.
    fn witness_preimage(&self, stem: &str, point: &str) -> PyResult<String> {
        let gamma = textio::parse_path(self.inner.original(), stem).map_err(err)?;
        let x = textio::parse_boundary(self.inner.collapsed(), point).map_err(err)?;
        Ok(open_preimage_witness(&self.inner, &gamma, &x)
            .map_err(err)?
            .to_string())
    }

    /// The intertwining identity at an infinite path and a stem literal.
    fn diagram_check(&self, x: &str, mu: &str) -> PyResult<bool> {
        let f_arc = Arc::new(self.inner.original().clone());
        let e_arc = Arc::new(self.inner.collapsed().clone());
        let x = textio::parse_spec(self.inner.original(), x).map_err(err)?;
        let mu = textio::parse_path(self.inner.collapsed(), mu).map_err(err)?;
        diagram_check(&self.inner, &f_arc, &e_arc, &x, &mu).map_err(err)
    }

    /// Map an element literal of the collapsed diagonal into the corner.
    fn pi(&self, a: &str) -> PyResult<String> {
        let f_arc = Arc::new(self.inner.original().clone());
        let e_arc = Arc::new(self.inner.collapsed().clone());
        let a = textio::parse_element(&e_arc, a).map_err(err)?;
        Ok(pi_map(&self.inner, &f_arc, &a).map_err(err)?.to_string())
    }

    /// Reduce the compression of an original-graph path into the image of
    /// the collapsed diagonal.
    fn pi_reduce(&self, mu: &str) -> PyResult<String> {
        let e_arc = Arc::new(self.inner.collapsed().clone());
        let mu = textio::parse_path(self.inner.original(), mu).map_err(err)?;
        Ok(pi_inverse_reduce(&self.inner, &e_arc, &mu)
            .map_err(err)?
            .to_string())
    }

    /// Compress a projection by the surviving vertex projections.
    fn compress(&self, mu: &str) -> PyResult<String> {
        let f_arc = Arc::new(self.inner.original().clone());
        let mu = textio::parse_path(self.inner.original(), mu).map_err(err)?;
        Ok(corner_compress(&self.inner, &f_arc, &mu)
            .map_err(err)?
            .to_string())
    }

    fn collapsed_tails(&self) -> Vec<String> {
        self.inner.collapsed_tails().cloned().collect()
    }
}

/// Parse the graph file format.
#[pyfunction]
fn parse_graph(text: &str) -> PyResult<PyGraph> {
    Ok(PyGraph::wrap(textio::parse_graph(text).map_err(err)?))
}

/// The q-projection of a stem inside a stem set, as an element literal, and
/// whether it is nonvanishing.
#[pyfunction]
fn q_projection(graph: &PyGraph, set: Vec<String>, mu: &str) -> PyResult<(String, bool)> {
    let g = &graph.inner;
    let fset: Vec<_> = set
        .iter()
        .map(|t| textio::parse_path(g, t))
        .collect::<pathspace::Result<_>>()
        .map_err(err)?;
    let mu = textio::parse_path(g, mu).map_err(err)?;
    let q = pathspace::diagonal::q_projection(g, &fset, &mu).map_err(err)?;
    let alive = pathspace::diagonal::q_is_nonzero(g, &fset, &mu).map_err(err)?;
    Ok((q.to_string(), alive))
}

#[pymodule]
fn pathspace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCollapseMap>()?;
    m.add_function(wrap_pyfunction!(parse_graph, m)?)?;
    m.add_function(wrap_pyfunction!(q_projection, m)?)?;
    Ok(())
}
