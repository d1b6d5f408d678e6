use std::cell::Cell;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mincub::cubature::{build_rule, verify_exactness};
use mincub::interp::{default_grid_2d, interpolate, lebesgue_square as leb_square};
use mincub::oracle::ReferenceIntegrator;
use mincub::{CubatureRule, DomainTag, Error, Gamma, JacobiParams, Point2};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NoConvergence { .. } | Error::NonFinite { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn params(alpha: f64, beta: f64) -> PyResult<JacobiParams> {
    JacobiParams::new(alpha, beta).map_err(to_py)
}

/// A cubature rule: nodes, positive weights summing to one, and its degree.
#[pyclass(name = "Rule", module = "mincub_py", frozen)]
struct PyRule {
    inner: CubatureRule,
}

#[pymethods]
impl PyRule {
    #[new]
    #[pyo3(signature = (domain, n, alpha = -0.5, beta = -0.5, gamma = -0.5))]
    fn new(domain: &str, n: usize, alpha: f64, beta: f64, gamma: f64) -> PyResult<Self> {
        let d: DomainTag = domain.parse().map_err(to_py)?;
        let g = Gamma::from_value(gamma).map_err(to_py)?;
        let inner = build_rule(d, params(alpha, beta)?, g, n).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: mincub::io::import_json(text).map_err(to_py)?,
        })
    }

    #[getter]
    fn domain(&self) -> &'static str {
        self.inner.domain.name()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree
    }

    #[getter]
    fn nodes(&self) -> Vec<(f64, f64)> {
        self.inner.nodes.iter().map(|p| (p.a, p.b)).collect()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights.clone()
    }

    /// `(j, k, branch)` per node.
    #[getter]
    fn orbit_index(&self) -> Vec<(usize, usize, u8)> {
        self.inner
            .orbit_index
            .iter()
            .map(|o| (o.j, o.k, o.branch))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Rule(domain='{}', n={}, nodes={}, degree={})",
            self.inner.domain,
            self.inner.n,
            self.inner.len(),
            self.inner.degree
        )
    }

    /// Applies the rule to a Python callable `f(x, y) -> float`.
    fn integrate(&self, f: &Bound<'_, PyAny>) -> PyResult<f64> {
        let vals = self
            .inner
            .nodes
            .iter()
            .map(|p| f.call1((p.a, p.b))?.extract::<f64>())
            .collect::<PyResult<Vec<f64>>>()?;
        let i = Cell::new(0);
        self.inner
            .apply(|_, _| {
                let v = vals[i.get()];
                i.set(i.get() + 1);
                v
            })
            .map_err(to_py)
    }

    /// Checks exactness against the reference integrator; returns
    /// `(passed, max_residual)`.
    fn verify(&self, py: Python<'_>) -> PyResult<(bool, f64)> {
        let rule = self.inner.clone();
        py.detach(move || {
            let oracle = ReferenceIntegrator::for_degree(rule.weight, rule.degree + 1)?;
            let r = verify_exactness(&rule, &oracle)?;
            Ok::<_, Error>((r.passed, r.max_residual))
        })
        .map_err(to_py)
    }

    /// Interpolates the sample values at the nodes and evaluates at `points`.
    fn interpolate(&self, samples: Vec<f64>, points: Vec<(f64, f64)>) -> PyResult<Vec<f64>> {
        let interp = interpolate(&self.inner, &samples).map_err(to_py)?;
        points
            .into_iter()
            .map(|(x, y)| interp.eval(Point2::new(x, y)).map_err(to_py))
            .collect()
    }

    fn to_json(&self) -> String {
        mincub::io::export_json(&self.inner)
    }

    fn to_csv(&self) -> String {
        mincub::io::export_csv(&self.inner)
    }
}

/// Gauss–Jacobi nodes (descending) and normalized weights.
#[pyfunction]
fn gauss_jacobi(alpha: f64, beta: f64, n: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let r = mincub::jacobi::gauss_rule(params(alpha, beta)?, n).map_err(to_py)?;
    Ok((r.nodes, r.weights))
}

#[pyfunction]
fn hat_h(alpha: f64, beta: f64, n: usize, m: usize) -> PyResult<f64> {
    mincub::jacobi::hat_h(params(alpha, beta)?, n, m).map_err(to_py)
}

/// Lebesgue constant of the square interpolant (`γ = -1/2`).
#[pyfunction]
#[pyo3(signature = (alpha, beta, n, grid = None))]
fn lebesgue_square(
    py: Python<'_>,
    alpha: f64,
    beta: f64,
    n: usize,
    grid: Option<usize>,
) -> PyResult<f64> {
    let p = params(alpha, beta)?;
    let grid = grid.unwrap_or_else(|| default_grid_2d(n));
    py.detach(move || leb_square(p, n, grid))
        .map(|e| e.value)
        .map_err(to_py)
}

#[pymodule]
fn mincub_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyRule>()?;
    m.add_function(wrap_pyfunction!(gauss_jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(hat_h, m)?)?;
    m.add_function(wrap_pyfunction!(lebesgue_square, m)?)?;
    Ok(())
}
