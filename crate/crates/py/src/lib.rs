use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sierpile_core::potential::{self, Statement};
use sierpile_core::render::{render_svg as render, SvgOptions};
use sierpile_core::sandpile::{self, Scheduler};
use sierpile_core::{build_gasket, corner_distance, GasketGraph, Point, Rat, SandpileConfig, TriCoord};

fn value_err(e: sierpile_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rat) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

fn fractions<'py>(py: Python<'py>, v: &[Rat]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    v.iter().map(|r| fraction(py, r)).collect()
}

/// Accepts int, Fraction or "n/d" strings.
fn to_rat(obj: &Bound<'_, PyAny>) -> PyResult<Rat> {
    obj.str()?.to_str()?.parse::<Rat>().map_err(value_err)
}

fn config(g: &GasketGraph, chips: Vec<u64>) -> PyResult<SandpileConfig> {
    SandpileConfig::from_chips(g, chips).map_err(value_err)
}

/// Level-n Sierpinski gasket graph.
#[pyclass(frozen)]
struct Gasket {
    inner: GasketGraph,
}

#[pymethods]
impl Gasket {
    #[new]
    fn new(level: u32) -> PyResult<Self> {
        Ok(Gasket { inner: build_gasket(level).map_err(value_err)? })
    }

    #[getter]
    fn level(&self) -> u32 {
        self.inner.level()
    }

    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// `(a, b)` triangular coordinates in canonical order.
    fn vertices(&self) -> Vec<(u32, u32)> {
        self.inner.vertices().iter().map(|c| (c.a, c.b)).collect()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.vertex_count() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).collect())
    }

    fn corners(&self) -> [usize; 3] {
        self.inner.corners()
    }

    fn cutpoints(&self) -> Option<[usize; 3]> {
        self.inner.cutpoints()
    }

    fn index_of(&self, a: u32, b: u32) -> Option<usize> {
        self.inner.index_of(TriCoord::new(a, b))
    }

    fn corner_distance(&self) -> Vec<u32> {
        corner_distance(&self.inner)
    }

    fn nearest_vertex(&self, x: f64, y: f64) -> PyResult<usize> {
        sierpile_core::nearest_vertex(&self.inner, Point::new(x, y)).map_err(value_err)
    }

    /// `{level, vertices, edges, corners, cutpoints}` as JSON text.
    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_dump()).expect("dump serializes")
    }

    fn __repr__(&self) -> String {
        format!("Gasket(level={}, vertices={}, edges={})", self.inner.level(), self.inner.vertex_count(), self.inner.edge_count())
    }
}

/// Sandpile identity of the level-n graph (`method`: "creutz" or "recursive").
#[pyfunction]
#[pyo3(signature = (level, method = "recursive"))]
fn identity(level: u32, method: &str) -> PyResult<Vec<u64>> {
    let g = build_gasket(level).map_err(value_err)?;
    let c = match method {
        "creutz" => sandpile::identity_creutz(&g),
        "recursive" => sandpile::identity_recursive(&g).map_err(value_err)?,
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    Ok(c.chips)
}

/// Stabilizes `chips`; returns the stable chips and the per-vertex toppling counts.
#[pyfunction]
#[pyo3(signature = (level, chips, seed = None))]
fn stabilize(level: u32, chips: Vec<u64>, seed: Option<u64>) -> PyResult<(Vec<u64>, Vec<u64>)> {
    let g = build_gasket(level).map_err(value_err)?;
    let scheduler = seed.map_or(Scheduler::Fifo, |seed| Scheduler::Random { seed });
    let (c, odo) = sandpile::stabilize_with(&g, &config(&g, chips)?, scheduler).map_err(value_err)?;
    Ok((c.chips, odo.topples))
}

#[pyfunction]
fn group_add(level: u32, a: Vec<u64>, b: Vec<u64>) -> PyResult<Vec<u64>> {
    let g = build_gasket(level).map_err(value_err)?;
    Ok(sandpile::group_add(&g, &config(&g, a)?, &config(&g, b)?).map_err(value_err)?.chips)
}

#[pyfunction]
fn is_recurrent(level: u32, chips: Vec<u64>) -> PyResult<bool> {
    let g = build_gasket(level).map_err(value_err)?;
    sandpile::is_recurrent(&g, &config(&g, chips)?).map_err(value_err)
}

#[pyfunction]
fn render_svg(level: u32, chips: Vec<u64>) -> PyResult<String> {
    let g = build_gasket(level).map_err(value_err)?;
    render(&g, &config(&g, chips)?, SvgOptions::default()).map_err(value_err)
}

/// Exact stopped Green function `g_n` (`mode`: "full" or "rows").
#[pyclass(frozen)]
struct GreenTable {
    inner: potential::GreenTable,
}

#[pymethods]
impl GreenTable {
    #[new]
    #[pyo3(signature = (level, mode = "full"))]
    fn new(level: u32, mode: &str) -> PyResult<Self> {
        let g = build_gasket(level).map_err(value_err)?;
        let inner = match mode {
            "full" => potential::green_dirichlet(&g),
            "rows" => potential::green_rows(&g),
            other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
        }
        .map_err(value_err)?;
        Ok(GreenTable { inner })
    }

    #[getter]
    fn level(&self) -> u32 {
        self.inner.level()
    }

    fn get<'py>(&self, py: Python<'py>, x: usize, y: usize) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.get(x, y).map_err(value_err)?)
    }

    fn row<'py>(&self, py: Python<'py>, x: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, &self.inner.row(x).map_err(value_err)?)
    }

    fn h_field<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, &potential::h_field(&self.inner))
    }

    fn convolve<'py>(&self, py: Python<'py>, chips: Vec<u64>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let c = config(self.inner.graph(), chips)?;
        fractions(py, &potential::convolve_green(&self.inner, &c).map_err(value_err)?)
    }
}

/// Series Green function `G(x, y)` for vertices of the level-n graph.
#[pyfunction]
fn green_series<'py>(py: Python<'py>, level: u32, x: (u32, u32), y: (u32, u32)) -> PyResult<Bound<'py, PyAny>> {
    let g = build_gasket(level).map_err(value_err)?;
    for (a, b) in [x, y] {
        if g.index_of(TriCoord::new(a, b)).is_none() {
            return Err(PyValueError::new_err(format!("({a}, {b}) is not a vertex of level {level}")));
        }
    }
    fraction(py, &potential::green_series(TriCoord::new(x.0, x.1), TriCoord::new(y.0, y.1), level))
}

/// Midpoint values `[m01, m02, m12]` of the harmonic extension.
#[pyfunction]
fn harmonic_extend<'py>(
    py: Python<'py>,
    c0: &Bound<'py, PyAny>,
    c1: &Bound<'py, PyAny>,
    c2: &Bound<'py, PyAny>,
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let ext = potential::harmonic_extend(&[to_rat(c0)?, to_rat(c1)?, to_rat(c2)?]);
    fractions(py, &ext)
}

/// `E_n(f)` for `f` given as numbers or fractions on the level-n vertices.
#[pyfunction]
fn energy<'py>(py: Python<'py>, level: u32, f: Vec<Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
    let g = build_gasket(level).map_err(value_err)?;
    let vals = f.iter().map(to_rat).collect::<PyResult<Vec<_>>>()?;
    fraction(py, &potential::energy(&g, &vals).map_err(value_err)?)
}

/// `(passed, max_abs_residual)` of `I_n + d_n/3 - 8 h_n/3`.
#[pyfunction]
fn decompose_check<'py>(py: Python<'py>, level: u32) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let rep = potential::decompose_check(level).map_err(value_err)?;
    Ok((rep.passed, fraction(py, &rep.max_abs)?))
}

/// Convergence rows for `tag` in I1/I2/I3 at a named point preset.
#[pyfunction]
#[pyo3(signature = (tag, preset = "midpoints", lo = 2, hi = 6))]
fn limit_report<'py>(py: Python<'py>, tag: &str, preset: &str, lo: u32, hi: u32) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let statement: Statement = tag.parse().map_err(value_err)?;
    let points = potential::preset(preset).map_err(value_err)?;
    let rep = potential::limit_report(statement, &points, lo..=hi).map_err(value_err)?;
    rep.rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("point_id", &r.point_id)?;
            d.set_item("n", r.n)?;
            d.set_item("vertex", (r.vertex.a, r.vertex.b))?;
            d.set_item("value", fraction(py, &r.value)?)?;
            d.set_item("limit", fraction(py, &r.limit)?)?;
            d.set_item("gap", fraction(py, &r.gap)?)?;
            Ok(d)
        })
        .collect()
}

#[pymodule(name = "sierpile")]
fn sierpile_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Gasket>()?;
    m.add_class::<GreenTable>()?;
    m.add_function(wrap_pyfunction!(identity, m)?)?;
    m.add_function(wrap_pyfunction!(stabilize, m)?)?;
    m.add_function(wrap_pyfunction!(group_add, m)?)?;
    m.add_function(wrap_pyfunction!(is_recurrent, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    m.add_function(wrap_pyfunction!(green_series, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_extend, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_check, m)?)?;
    m.add_function(wrap_pyfunction!(limit_report, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
