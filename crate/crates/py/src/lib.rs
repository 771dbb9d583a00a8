//! Python bindings: integration, classification, phase-plane analysis and
//! the variational checks of `wlw-core`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

use wlw_core::classifier::{classification_controls, classify_surface_with, ClassificationReport};
use wlw_core::io::json::error_kind;
use wlw_core::{Error, InitialConditions, IntegrationControls, Params};

create_exception!(wlw, WlwError, PyException, "Numerical or classification failure.");
create_exception!(wlw, InconclusiveError, WlwError, "The classifier could not decide the class.");

fn to_py(e: Error) -> PyErr {
    let msg = format!("{}: {e}", error_kind(&e));
    match e {
        Error::InvalidParams(_)
        | Error::NonPositiveRadius(_)
        | Error::NonPositiveScale(_)
        | Error::InvalidSpec(_)
        | Error::NoBracket(_) => PyValueError::new_err(msg),
        Error::Inconclusive(_) => InconclusiveError::new_err(msg),
        _ => WlwError::new_err(msg),
    }
}

/// Converts a serializable value to plain Python objects through JSON.
fn to_object<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| WlwError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn setup(
    a: f64,
    b: f64,
    x0: f64,
    theta0: f64,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_arclength: Option<f64>,
) -> PyResult<(Params, InitialConditions, IntegrationControls)> {
    let params = Params::new(a, b).map_err(to_py)?;
    let ic = InitialConditions::new(x0, theta0).map_err(to_py)?;
    let mut controls = classification_controls(&params, &ic);
    if rel_tol.is_some() || abs_tol.is_some() {
        controls = controls.with_tolerances(rel_tol.unwrap_or(controls.rel_tol), abs_tol.unwrap_or(controls.abs_tol));
    }
    if let Some(len) = max_arclength {
        controls = controls.with_max_arclength(len);
    }
    controls.validate().map_err(to_py)?;
    Ok((params, ic, controls))
}

/// Profile curve integrated forward and backward from `s = 0`.
#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    inner: wlw_core::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn s_range(&self) -> (f64, f64) {
        (self.inner.s_min(), self.inner.s_max())
    }

    #[getter]
    fn termination(&self) -> String {
        format!("{:?}", self.inner.termination)
    }

    #[getter]
    fn backward_termination(&self) -> String {
        format!("{:?}", self.inner.backward_termination)
    }

    /// Samples as `(s, x, z, theta)` tuples.
    #[getter]
    fn samples(&self) -> Vec<(f64, f64, f64, f64)> {
        self.inner.samples.iter().map(|st| (st.s, st.x, st.z, st.theta)).collect()
    }

    /// Interpolated `(x, z, theta)` at arclength `s`.
    fn state_at(&self, s: f64) -> PyResult<(f64, f64, f64)> {
        let st = self.inner.state_at(s).ok_or_else(|| to_py(Error::OutOfRange(s)))?;
        Ok((st.x, st.z, st.theta))
    }

    /// Events as a list of dicts.
    fn events(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_object(py, &self.inner.events)
    }

    /// Trajectory as CSV text with columns `s,x,z,theta,kappa1,kappa2`.
    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        wlw_core::io::csv::write_trajectory(&mut buf, &self.inner).map_err(to_py)?;
        Ok(String::from_utf8(buf).expect("CSV is ASCII"))
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.s_range();
        format!(
            "Trajectory(a={}, b={}, x0={}, theta0={}, s=[{lo}, {hi}], samples={})",
            self.inner.params.a(),
            self.inner.params.b(),
            self.inner.ic.x0(),
            self.inner.ic.theta0(),
            self.inner.samples.len()
        )
    }
}

/// Result of `classify`.
#[pyclass(name = "ClassificationReport", frozen)]
struct PyReport {
    inner: ClassificationReport,
}

#[pymethods]
impl PyReport {
    #[getter(class_name)]
    fn class_name(&self) -> &'static str {
        self.inner.class.name()
    }

    #[getter]
    fn radius(&self) -> Option<f64> {
        self.inner.radius
    }

    #[getter]
    fn pole_z(&self) -> Option<(f64, f64)> {
        self.inner.pole_z.map(|[a, b]| (a, b))
    }

    #[getter]
    fn period(&self) -> Option<f64> {
        self.inner.period
    }

    #[getter]
    fn z_shift(&self) -> Option<f64> {
        self.inner.z_shift
    }

    #[getter]
    fn self_intersections(&self) -> usize {
        self.inner.self_intersections
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_object(py, &self.inner)
    }

    fn to_json(&self) -> String {
        wlw_core::io::json::to_pretty(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("ClassificationReport(class={})", self.inner.class)
    }
}

/// Integrates the profile of `k1 = a k2 + b` through `(x0, 0)` with tangent angle `theta0`.
#[pyfunction]
#[pyo3(signature = (a, b, x0, theta0, rel_tol=None, abs_tol=None, max_arclength=None))]
fn integrate(
    a: f64,
    b: f64,
    x0: f64,
    theta0: f64,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_arclength: Option<f64>,
) -> PyResult<PyTrajectory> {
    let (params, ic, controls) = setup(a, b, x0, theta0, rel_tol, abs_tol, max_arclength)?;
    let inner = wlw_core::integrate(&params, &ic, &controls).map_err(to_py)?;
    Ok(PyTrajectory { inner })
}

#[pyfunction]
#[pyo3(signature = (a, b, x0, theta0, rel_tol=None, abs_tol=None, max_arclength=None))]
fn classify(
    a: f64,
    b: f64,
    x0: f64,
    theta0: f64,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_arclength: Option<f64>,
) -> PyResult<PyReport> {
    let (params, ic, controls) = setup(a, b, x0, theta0, rel_tol, abs_tol, max_arclength)?;
    let inner = classify_surface_with(&params, &ic, &controls).map_err(to_py)?;
    Ok(PyReport { inner })
}

/// Equilibria of the phase field as dicts with complex eigenvalues.
#[pyfunction]
fn critical_points(py: Python<'_>, a: f64, b: f64) -> PyResult<Vec<Py<PyDict>>> {
    let params = Params::new(a, b).map_err(to_py)?;
    wlw_core::phase::critical_points(&params)
        .into_iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("label", format!("{:?}", c.label))?;
            d.set_item("theta", c.theta)?;
            d.set_item("x", c.x)?;
            d.set_item("kind", format!("{:?}", c.kind))?;
            let ev: Vec<_> = c.eigenvalues.iter().map(|z| PyComplex::from_doubles(py, z.re, z.im)).collect();
            d.set_item("eigenvalues", ev)?;
            Ok(d.unbind())
        })
        .collect()
}

/// Initial radius separating the two outcomes of the forward branch from `theta0`.
#[pyfunction]
fn find_separatrix(a: f64, b: f64, theta0: f64, lo: f64, hi: f64) -> PyResult<f64> {
    let params = Params::new(a, b).map_err(to_py)?;
    wlw_core::phase::find_separatrix(&params, theta0, (lo, hi)).map_err(to_py)
}

/// Energy matched to `(a, b)`: `("power", p, mu)` or `("exp", nu, None)`.
#[pyfunction]
fn exponent_map(a: f64, b: f64) -> PyResult<(&'static str, f64, Option<f64>)> {
    use wlw_core::variational::EnergyParams;
    let params = Params::new(a, b).map_err(to_py)?;
    Ok(match wlw_core::variational::exponent_map(&params).map_err(to_py)? {
        EnergyParams::Power(e) => ("power", e.p(), Some(e.mu())),
        EnergyParams::Exp(e) => ("exp", e.nu(), None),
    })
}

/// Invariant checks on the trajectory; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (a, b, x0, theta0, p_override=None))]
fn check(py: Python<'_>, a: f64, b: f64, x0: f64, theta0: f64, p_override: Option<f64>) -> PyResult<Py<PyAny>> {
    let (rel, abs) = wlw_core::check::CHECK_TOLERANCES;
    let (params, ic, controls) = setup(a, b, x0, theta0, Some(rel), Some(abs), None)?;
    let traj = wlw_core::integrate(&params, &ic, &controls).map_err(to_py)?;
    let report = wlw_core::check::run_checks(&traj, p_override).map_err(to_py)?;
    to_object(py, &report)
}

/// Parses `0`, `pi/2`, `3pi/2` and similar into radians.
#[pyfunction]
fn parse_angle(text: &str) -> PyResult<f64> {
    wlw_core::parse_angle(text).map_err(to_py)
}

#[pymodule]
fn wlw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(critical_points, m)?)?;
    m.add_function(wrap_pyfunction!(find_separatrix, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_map, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(parse_angle, m)?)?;
    m.add("WlwError", m.py().get_type::<WlwError>())?;
    m.add("InconclusiveError", m.py().get_type::<InconclusiveError>())?;
    Ok(())
}
