//! Python bindings: scenarios, families, consistency reports and the Bell helpers.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyIndexError, PyKeyError, PyValueError};
use pyo3::prelude::*;

use cqt_core::bell;
use cqt_core::frameworks::{query_with_tol, QueryResult};
use cqt_core::histories::{check_consistency_with_tol, history_probability_with_tol, Family};
use cqt_core::linalg::StateVector;
use cqt_core::scenario::{self, ScenarioDoc};
use cqt_core::spin::{self, Direction, Sign};
use cqt_core::{Error, EPS_CONS};

create_exception!(cqt, CqtError, PyException);
create_exception!(cqt, ScenarioError, CqtError);
create_exception!(cqt, InconsistentFamilyError, CqtError);
create_exception!(cqt, IncompatibleError, CqtError);

fn core_err(e: Error) -> PyErr {
    match e {
        Error::QueryOnInconsistentFamily { .. } => InconsistentFamilyError::new_err(e.to_string()),
        Error::IncompatibleFrameworks(_)
        | Error::IncompatibleProperties { .. }
        | Error::TimeMismatch(..) => IncompatibleError::new_err(e.to_string()),
        other => CqtError::new_err(other.to_string()),
    }
}

fn scenario_err(e: scenario::ScenarioError) -> PyErr {
    ScenarioError::new_err(e.to_string())
}

fn sign(s: &str) -> PyResult<Sign> {
    match s {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => Err(PyValueError::new_err(format!(
            "sign must be '+' or '-', got {s:?}"
        ))),
    }
}

fn direction(theta: f64, phi: f64) -> PyResult<Direction> {
    Direction::wrapped(theta, phi).map_err(core_err)
}

/// A parsed scenario file.
#[pyclass(frozen, name = "Scenario", module = "cqt")]
struct PyScenario {
    doc: ScenarioDoc,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            doc: scenario::parse_scenario(text).map_err(scenario_err)?,
        })
    }

    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        scenario::builtin(name)
            .map(|doc| Self { doc })
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    #[getter]
    fn name(&self) -> &str {
        &self.doc.name
    }

    fn family_names(&self) -> Vec<String> {
        self.doc.families.iter().map(|f| f.name.clone()).collect()
    }

    fn family(&self, name: &str) -> PyResult<PyFamily> {
        let spec = self
            .doc
            .family(name)
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
        Ok(PyFamily {
            family: self.doc.build_family(spec).map_err(core_err)?,
            doc: self.doc.clone(),
        })
    }

    /// Canonical scenario text.
    fn render(&self) -> String {
        scenario::render_scenario(&self.doc)
    }

    /// JSON consistency report for every family.
    #[pyo3(signature = (tol = EPS_CONS))]
    fn report(&self, tol: f64) -> PyResult<String> {
        let run = scenario::run_scenario_with_tol(&self.doc, tol).map_err(core_err)?;
        Ok(scenario::render_machine(&run.report))
    }

    #[pyo3(signature = (tol = EPS_CONS))]
    fn text_report(&self, tol: f64) -> PyResult<String> {
        let run = scenario::run_scenario_with_tol(&self.doc, tol).map_err(core_err)?;
        Ok(scenario::render_text(&run))
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario({:?}, families={:?})",
            self.doc.name,
            self.family_names()
        )
    }
}

/// One family of histories with its initial state, grid and dynamics.
#[pyclass(frozen, name = "Family", module = "cqt")]
struct PyFamily {
    family: Family,
    doc: ScenarioDoc,
}

#[pymethods]
impl PyFamily {
    #[getter]
    fn name(&self) -> &str {
        self.family.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.family.dim()
    }

    fn histories(&self) -> Vec<String> {
        self.family
            .histories()
            .iter()
            .map(|h| h.label_string())
            .collect()
    }

    fn __len__(&self) -> usize {
        self.family.histories().len()
    }

    #[pyo3(signature = (tol = EPS_CONS))]
    fn check(&self, tol: f64) -> PyConsistencyReport {
        let r = check_consistency_with_tol(&self.family, tol);
        PyConsistencyReport {
            consistent: r.consistent,
            exhaustive: r.exhaustive,
            exhaustiveness_issue: r.exhaustiveness_issue,
            violating_pairs: r
                .violating_pairs
                .iter()
                .map(|p| (p.i, p.j, p.overlap))
                .collect(),
            weights: r.probabilities,
        }
    }

    /// Probability of history `number` (1-based).
    #[pyo3(signature = (number, tol = EPS_CONS))]
    fn probability(&self, number: usize, tol: f64) -> PyResult<f64> {
        let h = self
            .family
            .history(number)
            .ok_or_else(|| PyIndexError::new_err(format!("history {number} out of range")))?;
        history_probability_with_tol(h, &self.family, tol).map_err(core_err)
    }

    /// Probability of an event such as `"x1+"`, or `None` when the event is
    /// not part of this framework.
    #[pyo3(signature = (event, tol = EPS_CONS))]
    fn query(&self, event: &str, tol: f64) -> PyResult<Option<f64>> {
        let p = scenario::parse_event_label(&self.doc, event).map_err(scenario_err)?;
        Ok(
            match query_with_tol(&self.family, &p, tol).map_err(core_err)? {
                QueryResult::Probability(x) => Some(x),
                QueryResult::Meaningless(_) => None,
            },
        )
    }

    /// Events at `time_index` replaced by the identity, duplicates merged.
    fn coarse_grained(&self, time_index: usize) -> PyResult<Self> {
        Ok(Self {
            family: self.family.coarse_grained(time_index).map_err(core_err)?,
            doc: self.doc.clone(),
        })
    }

    fn refine(&self, other: &PyFamily) -> PyResult<Self> {
        Ok(Self {
            family: cqt_core::frameworks::refine(&self.family, &other.family).map_err(core_err)?,
            doc: self.doc.clone(),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Family({:?}, histories={})",
            self.family.name(),
            self.family.histories().len()
        )
    }
}

#[pyclass(frozen, get_all, name = "ConsistencyReport", module = "cqt")]
struct PyConsistencyReport {
    consistent: bool,
    exhaustive: bool,
    exhaustiveness_issue: Option<String>,
    /// `(i, j, overlap)` with 1-based history numbers.
    violating_pairs: Vec<(usize, usize, Complex64)>,
    /// Chain-ket weights; probabilities when the family is consistent.
    weights: Vec<f64>,
}

#[pymethods]
impl PyConsistencyReport {
    fn __repr__(&self) -> String {
        format!(
            "ConsistencyReport(consistent={}, exhaustive={}, violating_pairs={})",
            self.consistent,
            self.exhaustive,
            self.violating_pairs.len()
        )
    }
}

#[pyfunction]
fn builtin_names() -> Vec<&'static str> {
    scenario::builtin_names()
}

/// Born probability of spin `sign` along `(theta, phi)` for a one-spin state.
#[pyfunction]
fn born_probability(
    amplitudes: Vec<Complex64>,
    theta: f64,
    phi: f64,
    sign_: &str,
) -> PyResult<f64> {
    let psi = StateVector::new(amplitudes).map_err(core_err)?;
    spin::born_probability(&psi, direction(theta, phi)?, sign(sign_)?).map_err(core_err)
}

/// Singlet correlation `E(a, b)` computed from the chain-ket engine.
#[pyfunction]
fn singlet_correlation(theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64) -> PyResult<f64> {
    let s = bell::Settings::new(direction(theta_a, phi_a)?, direction(theta_b, phi_b)?);
    let joint = bell::singlet_joint_from_histories(s).map_err(core_err)?;
    Ok(bell::correlation_from_joint(&joint))
}

/// Singlet CHSH value for coplanar angles in degrees.
#[pyfunction]
#[pyo3(signature = (a = 0.0, a2 = 90.0, b = 45.0, b2 = 135.0))]
fn chsh(a: f64, a2: f64, b: f64, b2: f64) -> f64 {
    bell::chsh(
        bell::coplanar(a),
        bell::coplanar(a2),
        bell::coplanar(b),
        bell::coplanar(b2),
    )
}

#[pyfunction]
fn lhv_bound() -> f64 {
    bell::lhv_classical_bound()
}

#[pymodule]
fn cqt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyFamily>()?;
    m.add_class::<PyConsistencyReport>()?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    m.add_function(wrap_pyfunction!(born_probability, m)?)?;
    m.add_function(wrap_pyfunction!(singlet_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(chsh, m)?)?;
    m.add_function(wrap_pyfunction!(lhv_bound, m)?)?;
    let py = m.py();
    m.add("CqtError", py.get_type::<CqtError>())?;
    m.add("ScenarioError", py.get_type::<ScenarioError>())?;
    m.add(
        "InconsistentFamilyError",
        py.get_type::<InconsistentFamilyError>(),
    )?;
    m.add("IncompatibleError", py.get_type::<IncompatibleError>())?;
    m.add("EPS_CONS", EPS_CONS)?;
    Ok(())
}
