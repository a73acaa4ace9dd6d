//! Python bindings. Structured results cross the boundary as plain
//! dicts and lists decoded from the library's JSON serializations.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use knotcert::crofton::{bridge_certificate, crofton_estimate, maxima_average, total_slice_area, CroftonMode};
use knotcert::curvature::{angular_length, total_curvature};
use knotcert::diagram::{axis_or_generic_diagram, build_diagram, color_faces, render_svg, tricolorable, KnotDiagram, SvgStyle};
use knotcert::geom::{generate, io, KnotKind};
use knotcert::hull2::{in_second_hull, second_hull_witness};
use knotcert::isotopy::{greedy_simplify, scramble};
use knotcert::quadrisecant::{find_quadrisecants, QuadFilter};
use knotcert::verify::{verify as run_verify, VerifyOptions};
use knotcert::{Direction, KnotError, PolygonalKnot, Vec3};

fn err(e: KnotError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn vec3(v: [f64; 3]) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

fn direction(v: Option<[f64; 3]>) -> PyResult<Option<Direction>> {
    v.map(|v| Direction::new(vec3(v)).map_err(err)).transpose()
}

/// A simple closed polygonal curve in 3-space.
#[pyclass(name = "Knot", module = "knotcert", frozen)]
struct PyKnot {
    inner: PolygonalKnot,
}

#[pymethods]
impl PyKnot {
    #[new]
    #[pyo3(signature = (vertices, rel_eps = None))]
    fn new(vertices: Vec<[f64; 3]>, rel_eps: Option<f64>) -> PyResult<Self> {
        let vertices = vertices.into_iter().map(vec3).collect();
        let inner = match rel_eps {
            Some(eps) => PolygonalKnot::with_rel_eps(vertices, eps),
            None => PolygonalKnot::new(vertices),
        };
        Ok(Self { inner: inner.map_err(err)? })
    }

    /// Fixture knot: `convex_ngon`, `torus_knot`, `trefoil`,
    /// `random_closed` or `scrambled_unknot`.
    #[staticmethod]
    #[pyo3(signature = (kind, n = 4, radius = 1.0, p = 2, q = 3, samples = 60, major = 2.0, minor = 1.0, steps = 100, seed = 0))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        kind: &str,
        n: usize,
        radius: f64,
        p: u32,
        q: u32,
        samples: usize,
        major: f64,
        minor: f64,
        steps: usize,
        seed: u64,
    ) -> PyResult<Self> {
        let kind = match kind {
            "convex_ngon" => KnotKind::ConvexNgon { n, radius },
            "torus_knot" => KnotKind::TorusKnot { p, q, samples, major, minor },
            "trefoil" => KnotKind::TREFOIL,
            "random_closed" => KnotKind::RandomClosed { n },
            "scrambled_unknot" => KnotKind::ScrambledUnknot { steps },
            other => return Err(PyValueError::new_err(format!("unknown kind `{other}`"))),
        };
        Ok(Self { inner: generate(kind, seed).map_err(err)? })
    }

    /// Parses the JSON or plain-text knot format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let vertices = io::parse(text).map_err(err)?;
        Ok(Self { inner: PolygonalKnot::new(vertices).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::to_json(&self.inner)
    }

    fn to_text(&self) -> String {
        io::to_text(&self.inner)
    }

    #[getter]
    fn vertices(&self) -> Vec<[f64; 3]> {
        self.inner.vertices().iter().map(|v| [v.x, v.y, v.z]).collect()
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.inner.eps()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Knot({} vertices)", self.inner.len())
    }

    fn total_curvature(&self) -> f64 {
        total_curvature(&self.inner).total
    }

    fn turning_angles(&self) -> Vec<f64> {
        total_curvature(&self.inner).angles
    }

    fn angular_length(&self, o: [f64; 3]) -> PyResult<f64> {
        angular_length(&self.inner, &vec3(o)).map_err(err)
    }

    fn total_slice_area(&self) -> PyResult<f64> {
        total_slice_area(&self.inner).map_err(err)
    }

    /// Projection estimate of the total curvature; `mode` is `plane` or `line`.
    #[pyo3(signature = (mode = "plane", samples = 200_000, seed = 0))]
    fn crofton<'py>(&self, py: Python<'py>, mode: &str, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let mode = match mode {
            "plane" => CroftonMode::PlaneProjection,
            "line" => CroftonMode::LineProjection,
            other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
        };
        let knot = &self.inner;
        let est = py.detach(|| crofton_estimate(knot, mode, samples, seed)).map_err(err)?;
        to_py(py, &est)
    }

    #[pyo3(signature = (samples = 10_000, seed = 0))]
    fn maxima_average<'py>(&self, py: Python<'py>, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let knot = &self.inner;
        let avg = py.detach(|| maxima_average(knot, samples, seed)).map_err(err)?;
        to_py(py, &avg)
    }

    /// A single-maximum direction and the moves it yields, or `None`.
    #[pyo3(signature = (budget = 10_000, seed = 0))]
    fn bridge_certificate<'py>(&self, py: Python<'py>, budget: usize, seed: u64) -> PyResult<Option<Bound<'py, PyAny>>> {
        let knot = &self.inner;
        py.detach(|| bridge_certificate(knot, budget, seed)).map(|c| to_py(py, &c)).transpose()
    }

    /// Greedy triangular-move reduction: `(final_knot, move_sequence)`.
    #[pyo3(signature = (budget = 10_000))]
    fn simplify<'py>(&self, py: Python<'py>, budget: usize) -> PyResult<(PyKnot, Bound<'py, PyAny>)> {
        let (end, seq) = greedy_simplify(&self.inner, budget);
        Ok((PyKnot { inner: end }, to_py(py, &seq)?))
    }

    /// Random triangular moves: `(scrambled_knot, move_sequence)`.
    #[pyo3(signature = (steps, seed = 0))]
    fn scramble<'py>(&self, py: Python<'py>, steps: usize, seed: u64) -> PyResult<(PyKnot, Bound<'py, PyAny>)> {
        let (end, seq) = scramble(&self.inner, steps, seed).map_err(err)?;
        Ok((PyKnot { inner: end }, to_py(py, &seq)?))
    }

    /// Diagram along `direction`, or along z (falling back to a random
    /// generic direction) when omitted.
    #[pyo3(signature = (direction = None, seed = 0))]
    fn diagram(&self, direction: Option<[f64; 3]>, seed: u64) -> PyResult<PyDiagram> {
        let d = match self::direction(direction)? {
            Some(u) => build_diagram(&self.inner, Some(&u), seed),
            None => axis_or_generic_diagram(&self.inner, seed),
        };
        Ok(PyDiagram { inner: d.map_err(err)? })
    }

    #[pyo3(signature = (alternating_only = false))]
    fn quadrisecants<'py>(&self, py: Python<'py>, alternating_only: bool) -> PyResult<Bound<'py, PyAny>> {
        let filter = if alternating_only { QuadFilter::Alternating } else { QuadFilter::All };
        let knot = &self.inner;
        let scan = py.detach(|| find_quadrisecants(knot, filter)).map_err(err)?;
        to_py(py, &scan)
    }

    #[pyo3(signature = (point, budget = 10_000, seed = 0))]
    fn in_second_hull<'py>(&self, py: Python<'py>, point: [f64; 3], budget: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let knot = &self.inner;
        let w = py.detach(|| in_second_hull(knot, &vec3(point), budget, seed));
        to_py(py, &w)
    }

    /// First grid point not separated from the second hull, with its record.
    #[pyo3(signature = (grid = 9, budget = 10_000, seed = 0))]
    fn second_hull_witness<'py>(
        &self,
        py: Python<'py>,
        grid: usize,
        budget: usize,
        seed: u64,
    ) -> PyResult<Option<Bound<'py, PyAny>>> {
        let knot = &self.inner;
        let found = py.detach(|| second_hull_witness(knot, grid, budget, seed)).map_err(err)?;
        found.map(|(_, w)| to_py(py, &w)).transpose()
    }

    /// Runs the certificate suite and returns the report as a dict.
    #[pyo3(signature = (seed = 0, crofton_samples = 200_000, maxima_samples = 10_000, bridge_budget = 10_000, greedy_budget = 10_000, hull_grid = 9, hull_budget = 10_000, sphere_samples = 100_000))]
    #[allow(clippy::too_many_arguments)]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        seed: u64,
        crofton_samples: usize,
        maxima_samples: usize,
        bridge_budget: usize,
        greedy_budget: usize,
        hull_grid: usize,
        hull_budget: usize,
        sphere_samples: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let opts = VerifyOptions {
            seed,
            crofton_samples,
            maxima_samples,
            bridge_budget,
            greedy_budget,
            hull_grid,
            hull_budget,
            sphere_samples,
            timings: false,
        };
        let knot = &self.inner;
        let report = py.detach(|| run_verify(knot, &opts));
        to_py(py, &report)
    }
}

/// A generic projection with crossings, arcs and chessboard-colored faces.
#[pyclass(name = "Diagram", module = "knotcert", frozen)]
struct PyDiagram {
    inner: KnotDiagram,
}

#[pymethods]
impl PyDiagram {
    #[getter]
    fn direction(&self) -> [f64; 3] {
        let u = self.inner.direction.as_vec();
        [u.x, u.y, u.z]
    }

    #[getter]
    fn crossing_count(&self) -> usize {
        self.inner.crossing_count()
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.inner.faces.len()
    }

    #[getter]
    fn arc_count(&self) -> usize {
        self.inner.arcs.len()
    }

    /// Interior points of the bounded white faces.
    fn white_points(&self) -> PyResult<Vec<[f64; 2]>> {
        let c = color_faces(&self.inner).map_err(err)?;
        Ok(c.white_points.iter().map(|p| [p.x, p.y]).collect())
    }

    fn planar_angular_length(&self, o: [f64; 2]) -> f64 {
        self.inner.planar_angular_length(&knotcert::Vec2::new(o[0], o[1]))
    }

    /// Arc colors of a non-monochromatic 3-coloring, or `None`.
    fn tricoloring(&self) -> Option<Vec<u8>> {
        tricolorable(&self.inner).map(|c| c.colors)
    }

    #[pyo3(signature = (faces = false, marks = true))]
    fn svg(&self, faces: bool, marks: bool) -> PyResult<String> {
        let marks = if marks { color_faces(&self.inner).map_err(err)?.white_points } else { Vec::new() };
        Ok(render_svg(&self.inner, &SvgStyle { faces, marks, ..SvgStyle::default() }))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Diagram({} crossings, {} faces)", self.inner.crossing_count(), self.inner.faces.len())
    }
}

#[pymodule]
#[pyo3(name = "knotcert")]
fn knotcert_python(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKnot>()?;
    m.add_class::<PyDiagram>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
