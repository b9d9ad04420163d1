//! Python bindings: exact scalars, root data, and the JSON command runner.
//!
//! Structured results cross the boundary as JSON text; `json.loads` on the Python side
//! gives the same document the `schurcat` binary prints.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use schurcat::cli::{self, Command, RunConfig};
use schurcat::rootdata::{self, DEFAULT_WEYL_CAP};
use schurcat::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config { .. } | Error::ScalarParse { .. } | Error::InvalidCartanType { .. } | Error::InvalidCartanDatum(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Exact element of Q(q).
#[pyclass(name = "QScalar", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyQScalar(schurcat::QScalar);

#[pymethods]
impl PyQScalar {
    /// Parses expressions such as `q^2 - 1/(q + q^-1)`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        schurcat::QScalar::parse(text).map(PyQScalar).map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("QScalar('{}')", self.0)
    }

    fn __add__(&self, other: &Self) -> Self {
        PyQScalar(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyQScalar(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyQScalar(&self.0 * &other.0)
    }

    fn __neg__(&self) -> Self {
        PyQScalar(-&self.0)
    }

    fn __truediv__(&self, other: &Self) -> PyResult<Self> {
        self.0.div(&other.0).map(PyQScalar).map_err(div_err)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Image under `q ↦ q^{-1}`.
    fn bar(&self) -> Self {
        PyQScalar(self.0.bar())
    }

    /// Value at `one` or an exact rational, returned as a rational string.
    fn specialize(&self, at: &str) -> PyResult<String> {
        let p = schurcat::QPoint::parse(at).map_err(to_py)?;
        self.0.specialize(&p).map(|r| r.to_string()).map_err(to_py)
    }
}

fn div_err(e: Error) -> PyErr {
    match e {
        Error::DivisionByZero => pyo3::exceptions::PyZeroDivisionError::new_err(e.to_string()),
        other => to_py(other),
    }
}

/// Symmetric q-integer `[m]` at base `q^d`.
#[pyfunction]
#[pyo3(signature = (m, d=1))]
fn qint(m: i64, d: u32) -> PyQScalar {
    PyQScalar(schurcat::qint(m, d))
}

/// Symmetric Gaussian binomial at base `q^d`.
#[pyfunction]
#[pyo3(signature = (n, k, d=1))]
fn qbinom(n: u32, k: i64, d: u32) -> PyQScalar {
    PyQScalar(schurcat::qbinom(n, k, d))
}

/// Cartan datum of a finite type such as `A2` or `G2`.
#[pyclass(name = "CartanDatum", frozen)]
struct PyCartan(rootdata::CartanDatum);

#[pymethods]
impl PyCartan {
    #[new]
    fn new(cartan_type: &str) -> PyResult<Self> {
        rootdata::parse_type(cartan_type).map(PyCartan).map_err(to_py)
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label.clone()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<i64>> {
        self.0.a.clone()
    }

    #[getter]
    fn symmetrizers(&self) -> Vec<u32> {
        self.0.d.clone()
    }

    fn positive_roots(&self) -> Vec<Vec<i64>> {
        rootdata::positive_roots(&self.0).roots
    }

    fn weyl_order(&self) -> PyResult<usize> {
        rootdata::weyl_table(&self.0, DEFAULT_WEYL_CAP).map(|t| t.order()).map_err(to_py)
    }

    fn flag_betti(&self) -> PyResult<Vec<usize>> {
        rootdata::weyl_table(&self.0, DEFAULT_WEYL_CAP).map(|t| rootdata::flag_betti(&t)).map_err(to_py)
    }

    /// Kostant partition function at `beta` in simple-root coordinates.
    fn kostant(&self, beta: Vec<i64>) -> PyResult<u64> {
        if beta.len() != self.0.rank() {
            return Err(PyValueError::new_err(format!("beta needs {} entries", self.0.rank())));
        }
        Ok(rootdata::kostant(&rootdata::positive_roots(&self.0), &beta))
    }

    fn __repr__(&self) -> String {
        format!("CartanDatum('{}')", self.0.label)
    }
}

fn parse_command(name: &str) -> PyResult<Command> {
    Ok(match name {
        "root-data" => Command::RootData,
        "hilbert" => Command::Hilbert,
        "build-module" => Command::BuildModule,
        "check-module" => Command::CheckModule,
        "ext" => Command::Ext,
        "schur-check" => Command::SchurCheck,
        "koszul-check" => Command::KoszulCheck,
        other => return Err(PyValueError::new_err(format!("unknown command {other:?}"))),
    })
}

/// Runs a command on a RunConfig JSON object and returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (command, config="{}"))]
fn run(py: Python<'_>, command: &str, config: &str) -> PyResult<String> {
    let cmd = parse_command(command)?;
    let cfg = RunConfig::from_json(config).map_err(to_py)?;
    py.detach(|| cli::run(cmd, &cfg)).map(|r| r.to_json()).map_err(to_py)
}

/// Like [`run`] but without the timing and cache metadata; identical configs give identical text.
#[pyfunction]
#[pyo3(signature = (command, config="{}"))]
fn run_deterministic(py: Python<'_>, command: &str, config: &str) -> PyResult<String> {
    let cmd = parse_command(command)?;
    let cfg = RunConfig::from_json(config).map_err(to_py)?;
    py.detach(|| cli::run(cmd, &cfg)).map(|r| r.deterministic_json()).map_err(to_py)
}

#[pymodule]
fn pyschurcat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQScalar>()?;
    m.add_class::<PyCartan>()?;
    m.add_function(wrap_pyfunction!(qint, m)?)?;
    m.add_function(wrap_pyfunction!(qbinom, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_deterministic, m)?)?;
    m.add("REPORT_SCHEMA", cli::SCHEMA)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
