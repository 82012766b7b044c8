//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may be `int`, `Fraction` or strings `"p/q"`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;

use ratsdp::diophantine;
use ratsdp::exact::{bit_size_scalar, format_rational, parse_rational, Rational};
use ratsdp::io;
use ratsdp::linalg::SymMatrix;
use ratsdp::model::SdpProblem;
use ratsdp::solver::{self, SolveOptions};

create_exception!(ratsdp, SolveError, PyException);
create_exception!(ratsdp, VerifyError, PyException);

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    parse_rational(&text).map_err(|e| PyValueError::new_err(format!("{text:?}: {e}")))
}

fn to_fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    fraction.call1((format_rational(x),))
}

fn matrix_to_py<'py>(py: Python<'py>, x: &SymMatrix) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    x.to_rows()
        .iter()
        .map(|row| row.iter().map(|v| to_fraction(py, v)).collect())
        .collect()
}

/// A validated instance.
#[pyclass(name = "Problem", module = "ratsdp", frozen)]
struct PyProblem {
    inner: SdpProblem,
}

#[pymethods]
impl PyProblem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::parse_instance(text)
            .map(|inner| PyProblem { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        io::instance_to_json(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    /// Dimension of the affine slice.
    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn epsilon<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, self.inner.epsilon())
    }

    #[pyo3(signature = (max_iters=None, phase1_only=false))]
    fn solve(&self, py: Python<'_>, max_iters: Option<u64>, phase1_only: bool) -> PyResult<PySolution> {
        let options = SolveOptions {
            max_iters,
            phase1_only,
            ..SolveOptions::default()
        };
        let problem = &self.inner;
        let solution = py
            .detach(|| solver::solve(problem, &options).map_err(|e| e.to_string()))
            .map_err(SolveError::new_err)?;
        Ok(PySolution {
            json: io::solution_to_json(problem, &solution, false),
            trace: io::trace_to_json_lines(&solution.trace),
            iterations: solution.iterations(),
            x_star: solution.x_star.matrix().clone(),
            objective: solution.objective,
            gap_bound: solution.gap_bound,
        })
    }

    /// Exact re-verification of a solution document.
    fn verify(&self, solution_json: &str) -> PyResult<()> {
        let file =
            io::parse_solution(solution_json, self.inner.n()).map_err(|e| PyValueError::new_err(e.to_string()))?;
        io::verify_solution(&self.inner, &file).map_err(|e| VerifyError::new_err(e.to_string()))
    }
}

#[pyclass(name = "Solution", module = "ratsdp", frozen)]
struct PySolution {
    x_star: SymMatrix,
    objective: Rational,
    gap_bound: Rational,
    iterations: (u64, u64),
    json: String,
    trace: String,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn x_star<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        matrix_to_py(py, &self.x_star)
    }

    #[getter]
    fn objective<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, &self.objective)
    }

    #[getter]
    fn gap_bound<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, &self.gap_bound)
    }

    #[getter]
    fn iterations(&self) -> (u64, u64) {
        self.iterations
    }

    fn to_json(&self) -> String {
        self.json.clone()
    }

    /// Per-iteration records as JSON lines.
    fn trace_json_lines(&self) -> String {
        self.trace.clone()
    }
}

/// Best approximation `(p, q)` with `q ≤ 1/eps` and `|qα − p| ≤ eps`.
#[pyfunction]
fn approx_scalar<'py>(
    py: Python<'py>,
    alpha: &Bound<'py, PyAny>,
    eps: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyTuple>> {
    let a = diophantine::approx_scalar(&to_rational(alpha)?, &to_rational(eps)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    PyTuple::new(py, [a.p, a.q])
}

/// Componentwise rounding of a vector with tolerance `eps`.
#[pyfunction]
fn approx_vector<'py>(
    py: Python<'py>,
    alpha: Vec<Bound<'py, PyAny>>,
    eps: &Bound<'py, PyAny>,
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let alpha = alpha.iter().map(to_rational).collect::<PyResult<Vec<_>>>()?;
    diophantine::approx_vector(&alpha, &to_rational(eps)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?
        .iter()
        .map(|v| to_fraction(py, v))
        .collect()
}

/// Encoding length of a rational.
#[pyfunction]
fn bit_size(x: &Bound<'_, PyAny>) -> PyResult<u64> {
    Ok(bit_size_scalar(&to_rational(x)?).bits())
}

#[pymodule]
#[pyo3(name = "ratsdp")]
fn ratsdp_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(approx_scalar, m)?)?;
    m.add_function(wrap_pyfunction!(approx_vector, m)?)?;
    m.add_function(wrap_pyfunction!(bit_size, m)?)?;
    m.add("SolveError", m.py().get_type::<SolveError>())?;
    m.add("VerifyError", m.py().get_type::<VerifyError>())?;
    Ok(())
}
