use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use derham_core::complexes::ChainComplex;
use derham_core::dalg::{self, AlgebraPresentation, Theory};
use derham_core::dold_kan::{self, PowerKind};
use derham_core::graded::FilteredStub;
use derham_core::linalg::RingSpec;

create_exception!(derham, DerhamError, PyException);
create_exception!(derham, PreconditionError, DerhamError);

fn err(e: derham_core::Error) -> PyErr {
    if e.exit_code() == 3 {
        PreconditionError::new_err(e.to_string())
    } else {
        DerhamError::new_err(e.to_string())
    }
}

fn homology_dict(py: Python<'_>, c: &ChainComplex) -> PyResult<Py<PyAny>> {
    let d = pyo3::types::PyDict::new(py);
    for (i, g) in c.homology().groups() {
        d.set_item(*i, g.to_string())?;
    }
    Ok(d.into_any().unbind())
}

/// A bounded chain complex of free modules over Z, Q or F_p.
#[pyclass(name = "ChainComplex", module = "derham", frozen)]
struct PyChainComplex {
    inner: ChainComplex,
}

#[pymethods]
impl PyChainComplex {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| DerhamError::new_err(e.to_string()))?;
        Ok(PyChainComplex { inner: ChainComplex::from_json(&v).map_err(err)? })
    }

    /// `ring^rank` placed in a single degree.
    #[staticmethod]
    fn concentrated(ring: &str, degree: i32, rank: usize) -> PyResult<Self> {
        let ring = RingSpec::parse(ring).map_err(err)?;
        Ok(PyChainComplex { inner: ChainComplex::concentrated(ring, degree, rank) })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    #[getter]
    fn ring(&self) -> String {
        self.inner.ring().to_string()
    }

    fn rank(&self, degree: i32) -> usize {
        self.inner.rank(degree)
    }

    fn shift(&self, n: i32) -> Self {
        PyChainComplex { inner: self.inner.shift(n) }
    }

    fn tensor(&self, other: &PyChainComplex) -> PyResult<Self> {
        Ok(PyChainComplex { inner: self.inner.tensor(&other.inner).map_err(err)? })
    }

    /// `{degree: "group"}` for the nonzero homology groups.
    fn homology(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        homology_dict(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("ChainComplex({}, {})", self.inner.ring(), self.inner.homology())
    }
}

/// A filtered complex modulo `F^N`.
#[pyclass(name = "FilteredStub", module = "derham", frozen)]
struct PyFilteredStub {
    inner: FilteredStub,
}

#[pymethods]
impl PyFilteredStub {
    #[getter]
    #[allow(non_snake_case)]
    fn N(&self) -> usize {
        self.inner.n()
    }

    fn level(&self, s: usize) -> PyResult<PyChainComplex> {
        if s >= self.inner.n() {
            return Err(DerhamError::new_err(format!("level {s} out of range")));
        }
        Ok(PyChainComplex { inner: self.inner.level(s).clone() })
    }

    fn gr(&self, s: usize) -> PyResult<PyChainComplex> {
        Ok(PyChainComplex { inner: self.inner.gr(s).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!("FilteredStub(N={}, ring={})", self.inner.n(), self.inner.ring())
    }
}

/// `k[x_1..x_n]/(f_1..f_c)` with a regularity hint.
#[pyclass(name = "AlgebraPresentation", module = "derham", frozen)]
struct PyAlgebraPresentation {
    inner: AlgebraPresentation,
}

#[pymethods]
impl PyAlgebraPresentation {
    #[new]
    #[pyo3(signature = (ring, vars, rels, regularity = "regseq"))]
    fn new(ring: &str, vars: Vec<String>, rels: Vec<String>, regularity: &str) -> PyResult<Self> {
        let v: Vec<&str> = vars.iter().map(String::as_str).collect();
        let r: Vec<&str> = rels.iter().map(String::as_str).collect();
        Ok(PyAlgebraPresentation { inner: AlgebraPresentation::parse_parts(ring, &v, &r, regularity).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (name, p = 3))]
    fn preset(name: &str, p: u64) -> PyResult<Self> {
        Ok(PyAlgebraPresentation { inner: AlgebraPresentation::preset(name, p).map_err(err)? })
    }

    fn kahler(&self) -> PyResult<String> {
        Ok(dalg::kahler(&self.inner).map_err(err)?.to_string())
    }

    #[pyo3(signature = (theory, n, bound = None))]
    fn stub(&self, theory: &str, n: usize, bound: Option<i64>) -> PyResult<PyFilteredStub> {
        let t = Theory::parse(theory).map_err(err)?;
        Ok(PyFilteredStub { inner: dalg::theory_stub(&self.inner, t, n, bound).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!("AlgebraPresentation({})", self.inner)
    }
}

/// `LF^r(c)` for `kind` in sym, ext, div, antisym.
#[pyfunction]
#[pyo3(signature = (kind, r, c, degree_cutoff = 10))]
fn derived_power(kind: &str, r: usize, c: &PyChainComplex, degree_cutoff: usize) -> PyResult<PyChainComplex> {
    let k = PowerKind::parse(kind).map_err(err)?;
    Ok(PyChainComplex { inner: dold_kan::derived_power(k, r, &c.inner, degree_cutoff).map_err(err)? })
}

#[pyfunction]
fn filtered_circle(n: usize) -> PyResult<PyFilteredStub> {
    Ok(PyFilteredStub { inner: dalg::filtered_circle_stub(n).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (i, rank, n, ring = "Z"))]
fn free_crystalline_stub(i: usize, rank: usize, n: usize, ring: &str) -> PyResult<PyFilteredStub> {
    let ring = RingSpec::parse(ring).map_err(err)?;
    Ok(PyFilteredStub { inner: dalg::free_crystalline_stub(ring, i, rank, n).map_err(err)? })
}

/// Runs the command line with `args` (without the program name); returns `(exit_code, stdout)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    let out = derham_core::cli::run(std::iter::once("derham".to_string()).chain(args));
    (out.code, out.stdout)
}

#[pymodule]
fn derham(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChainComplex>()?;
    m.add_class::<PyFilteredStub>()?;
    m.add_class::<PyAlgebraPresentation>()?;
    m.add_function(wrap_pyfunction!(derived_power, m)?)?;
    m.add_function(wrap_pyfunction!(filtered_circle, m)?)?;
    m.add_function(wrap_pyfunction!(free_crystalline_stub, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("DerhamError", m.py().get_type::<DerhamError>())?;
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    Ok(())
}
