//! Python bindings for `qaxioms`.
//!
//! Vectors are lists of Python `complex`, matrices are lists of rows. Reports
//! come back as plain dicts with the same layout as the CLI's JSON output.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use qaxioms::composite::{density_from_state, partial_trace as core_partial_trace, DensityMatrix};
use qaxioms::evolution::{self, EvolutionOperator};
use qaxioms::linalg::{classify_operator, ComplexMatrix, ComplexVector, OperatorClass, DEFAULT_CLASSIFY_TOL};
use qaxioms::measurement::{self, DEFAULT_DEGENERACY_TOL};
use qaxioms::signaling::{self, SignalingConfig};
use qaxioms::states::{self, RawState, StateVector, UnitState, DEFAULT_PHASE_TOL};
use qaxioms::Error;

create_exception!(
    pyqaxioms,
    SingularOperatorError,
    PyValueError,
    "Operator is singular and inadmissible."
);
create_exception!(
    pyqaxioms,
    NumericContractError,
    PyArithmeticError,
    "A numerical postcondition failed."
);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::SingularOperator(_) => SingularOperatorError::new_err(e.to_string()),
        Error::NumericContract(_) => NumericContractError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for qaxioms::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn vector(v: Vec<Complex64>) -> PyResult<ComplexVector> {
    ComplexVector::new(v).py()
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).py()
}

fn raw(v: Vec<Complex64>) -> PyResult<RawState> {
    RawState::new(vector(v)?).py()
}

fn unit(v: Vec<Complex64>) -> PyResult<UnitState> {
    UnitState::new(vector(v)?).py()
}

fn rows_of(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn class_name(c: &OperatorClass) -> &'static str {
    match c {
        OperatorClass::Unitary => "Unitary",
        OperatorClass::ProportionalUnitary { .. } => "ProportionalUnitary",
        OperatorClass::GeneralInvertible => "GeneralInvertible",
        OperatorClass::Singular => "Singular",
    }
}

/// Hermitian observable with its eigenspace decomposition.
#[pyclass(name = "Observable", frozen)]
struct PyObservable {
    inner: measurement::Observable,
}

#[pymethods]
impl PyObservable {
    #[new]
    #[pyo3(signature = (matrix, degeneracy_tol = DEFAULT_DEGENERACY_TOL))]
    fn new(matrix: Vec<Vec<Complex64>>, degeneracy_tol: f64) -> PyResult<Self> {
        let m = self::matrix(matrix)?;
        Ok(Self {
            inner: measurement::make_observable(&m, degeneracy_tol).py()?,
        })
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        rows_of(self.inner.matrix())
    }

    fn __repr__(&self) -> String {
        format!("Observable(eigenvalues={:?})", self.inner.eigenvalues())
    }
}

/// Square operator with its admissibility class.
#[pyclass(name = "Operator", frozen)]
struct PyOperator {
    inner: EvolutionOperator,
}

#[pymethods]
impl PyOperator {
    #[new]
    #[pyo3(signature = (matrix, label = String::from("U")))]
    fn new(matrix: Vec<Vec<Complex64>>, label: String) -> PyResult<Self> {
        Ok(Self {
            inner: EvolutionOperator::new(self::matrix(matrix)?, label).py()?,
        })
    }

    #[getter]
    fn class_name(&self) -> &'static str {
        class_name(&self.inner.class())
    }

    #[getter]
    fn verdict(&self) -> &'static str {
        self.inner.class().verdict()
    }

    #[getter]
    fn scale(&self) -> Option<f64> {
        self.inner.class().scale_modulus()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        rows_of(self.inner.matrix())
    }

    /// Standard evolution. `unit=True` treats the input as a unit vector.
    #[pyo3(signature = (state, unit = true))]
    fn evolve_unitary(&self, state: Vec<Complex64>, unit: bool) -> PyResult<Vec<Complex64>> {
        Ok(if unit {
            evolution::evolve_unitary(&self::unit(state)?, &self.inner)
                .py()?
                .into_vector()
                .into_entries()
        } else {
            evolution::evolve_unitary(&raw(state)?, &self.inner)
                .py()?
                .into_vector()
                .into_entries()
        })
    }

    fn evolve_linear_b(&self, state: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        Ok(evolution::evolve_linear_b(&raw(state)?, &self.inner)
            .py()?
            .into_vector()
            .into_entries())
    }

    fn evolve_manual_norm_a(&self, state: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        Ok(evolution::evolve_manual_norm_a(&unit(state)?, &self.inner)
            .py()?
            .into_vector()
            .into_entries())
    }

    fn linearity_defect(
        &self,
        psi1: Vec<Complex64>,
        psi2: Vec<Complex64>,
        a: Complex64,
        b: Complex64,
    ) -> PyResult<f64> {
        evolution::linearity_defect(&self.inner, &unit(psi1)?, &unit(psi2)?, a, b).py()
    }

    /// Runs the unitarity laboratory and returns its report as a dict.
    #[pyo3(signature = (n_samples = 1000, seed = 0))]
    fn theorem_check<'py>(&self, py: Python<'py>, n_samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let report = py
            .detach(|| evolution::theorem1_lab(&self.inner, n_samples, seed))
            .py()?;
        let out = to_dict(py, &report)?;
        out.set_item("verdict", report.verdict())?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Operator(label={:?}, class={})",
            self.inner.label(),
            class_name(&self.inner.class())
        )
    }
}

/// Classification of a square matrix: `(class_name, verdict, scale)`.
#[pyfunction]
#[pyo3(signature = (matrix, tol = DEFAULT_CLASSIFY_TOL))]
fn classify(matrix: Vec<Vec<Complex64>>, tol: f64) -> PyResult<(&'static str, &'static str, Option<f64>)> {
    let c = classify_operator(&self::matrix(matrix)?, tol).py()?;
    Ok((class_name(&c), c.verdict(), c.scale_modulus()))
}

#[pyfunction]
fn normalize(state: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(states::normalize(&raw(state)?).py()?.into_vector().into_entries())
}

#[pyfunction]
#[pyo3(signature = (state, phase_tol = DEFAULT_PHASE_TOL))]
fn canonicalize(state: Vec<Complex64>, phase_tol: f64) -> PyResult<Vec<Complex64>> {
    Ok(states::canonicalize(&raw(state)?, phase_tol)
        .py()?
        .into_vector()
        .into_entries())
}

#[pyfunction]
#[pyo3(signature = (u, v, tol = 1e-9))]
fn equivalent_a(u: Vec<Complex64>, v: Vec<Complex64>, tol: f64) -> PyResult<bool> {
    states::equivalent_a(&unit(u)?, &unit(v)?, tol).py()
}

#[pyfunction]
#[pyo3(signature = (s, t, tol = 1e-9))]
fn equivalent_b(s: Vec<Complex64>, t: Vec<Complex64>, tol: f64) -> PyResult<bool> {
    states::equivalent_b(&raw(s)?, &raw(t)?, tol).py()
}

/// `[(eigenvalue, probability), ...]` from the unit-vector Born rule.
#[pyfunction]
fn born_probabilities_a(state: Vec<Complex64>, observable: &PyObservable) -> PyResult<Vec<(f64, f64)>> {
    let d = measurement::born_probabilities_a(&unit(state)?, &observable.inner).py()?;
    Ok(d.outcomes.iter().map(|o| (o.eigenvalue, o.probability)).collect())
}

/// `[(eigenvalue, probability), ...]` from the raw-vector Born rule.
#[pyfunction]
fn born_probabilities_b(state: Vec<Complex64>, observable: &PyObservable) -> PyResult<Vec<(f64, f64)>> {
    let d = measurement::born_probabilities_b(&raw(state)?, &observable.inner).py()?;
    Ok(d.outcomes.iter().map(|o| (o.eigenvalue, o.probability)).collect())
}

/// One seeded measurement: `(eigenvalue, post_state)`. Raw inputs collapse
/// to the unnormalized projection, unit inputs are renormalized.
#[pyfunction]
#[pyo3(signature = (state, observable, seed, unit = false))]
fn sample_measurement(
    state: Vec<Complex64>,
    observable: &PyObservable,
    seed: u64,
    unit: bool,
) -> PyResult<(f64, Vec<Complex64>)> {
    fn finish<S: StateVector>(r: measurement::MeasurementRecord<S>) -> (f64, Vec<Complex64>) {
        (r.observed_eigenvalue, r.post_state.vector().entries().to_vec())
    }
    Ok(if unit {
        finish(measurement::sample_measurement(&self::unit(state)?, &observable.inner, seed).py()?)
    } else {
        finish(measurement::sample_measurement(&raw(state)?, &observable.inner, seed).py()?)
    })
}

/// Reduced density matrix of one qubit of a pure `n_qubits` state.
#[pyfunction]
#[pyo3(signature = (state, keep, n_qubits, normalized = true))]
fn partial_trace(
    state: Vec<Complex64>,
    keep: usize,
    n_qubits: usize,
    normalized: bool,
) -> PyResult<Vec<Vec<Complex64>>> {
    let s = raw(state)?;
    let rho = if normalized {
        density_from_state(&s).py()?
    } else {
        DensityMatrix::from_state_unnormalized(&s)
    };
    Ok(rows_of(core_partial_trace(&rho, keep, n_qubits).py()?.matrix()))
}

/// Runs the Bell-pair signaling protocol and returns its report.
#[pyfunction]
#[pyo3(signature = (epsilon = signaling::DEFAULT_EPSILON, bit = 0, n_trials = signaling::DEFAULT_TRIALS, seed = 0))]
fn run_protocol(py: Python<'_>, epsilon: f64, bit: u8, n_trials: u64, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let cfg = SignalingConfig::new(epsilon, bit, n_trials, seed).py()?;
    let report = py.detach(|| signaling::run_protocol(&cfg)).py()?;
    to_dict(py, &report)
}

/// Max deviation of Bob's marginal from uniform over random unitary gates.
#[pyfunction]
#[pyo3(signature = (n_unitaries = 100, seed = 0))]
fn no_communication_check(py: Python<'_>, n_unitaries: usize, seed: u64) -> PyResult<f64> {
    let r = py
        .detach(|| signaling::no_communication_check(n_unitaries, seed))
        .py()?;
    Ok(r.max_marginal_deviation)
}

/// Rows of `{epsilon, analytic_error, empirical_error, ...}`.
#[pyfunction]
#[pyo3(signature = (epsilons, n_trials = signaling::DEFAULT_TRIALS, seed = 0))]
fn error_rate_sweep(py: Python<'_>, epsilons: Vec<f64>, n_trials: u64, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let rows = py
        .detach(|| signaling::error_rate_sweep(&epsilons, n_trials, seed))
        .py()?;
    to_dict(py, &rows)
}

#[pymodule]
pub fn pyqaxioms(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyObservable>()?;
    m.add_class::<PyOperator>()?;
    m.add("SingularOperatorError", m.py().get_type::<SingularOperatorError>())?;
    m.add("NumericContractError", m.py().get_type::<NumericContractError>())?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent_a, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent_b, m)?)?;
    m.add_function(wrap_pyfunction!(born_probabilities_a, m)?)?;
    m.add_function(wrap_pyfunction!(born_probabilities_b, m)?)?;
    m.add_function(wrap_pyfunction!(sample_measurement, m)?)?;
    m.add_function(wrap_pyfunction!(partial_trace, m)?)?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(no_communication_check, m)?)?;
    m.add_function(wrap_pyfunction!(error_rate_sweep, m)?)?;
    Ok(())
}
