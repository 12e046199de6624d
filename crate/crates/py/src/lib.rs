//! Python bindings for the wedge Casimir library.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use wedge_casimir::casimir_polder::{self, DipoleParams};
use wedge_casimir::closed_form::{self, StringParams};
use wedge_casimir::error::GeometryError;
use wedge_casimir::geometry::{self, UnitSystem, WedgeAngle};
use wedge_casimir::mode_sum::{self, OracleRoute};
use wedge_casimir::quadrature::{ExtrapolationSpec, QuadratureSpec};

fn to_py(e: wedge_casimir::Error) -> PyErr {
    use wedge_casimir::Error as E;
    match e {
        E::Geometry(_) | E::OnWall { .. } | E::NeedsRadialSplit { .. } | E::Coincident => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn geo_err(e: GeometryError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Wedge of opening angle `pi / p`.
#[pyclass(frozen, skip_from_py_object, name = "WedgeGeometry")]
#[derive(Clone, Copy)]
pub struct PyWedge(geometry::WedgeGeometry);

#[pymethods]
impl PyWedge {
    #[new]
    fn new(p: u32) -> PyResult<Self> {
        geometry::WedgeGeometry::new(p).map(Self).map_err(geo_err)
    }

    /// Rejects angles that are not `pi / p` for integer `p`.
    #[staticmethod]
    fn from_alpha(alpha: f64) -> PyResult<Self> {
        geometry::WedgeGeometry::from_alpha(alpha).map(Self).map_err(geo_err)
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    fn __repr__(&self) -> String {
        format!("WedgeGeometry(p={})", self.0.p())
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Medium")]
#[derive(Clone, Copy)]
pub struct PyMedium(geometry::Medium);

#[pymethods]
impl PyMedium {
    #[new]
    #[pyo3(signature = (epsilon = 1.0, mu = 1.0))]
    fn new(epsilon: f64, mu: f64) -> PyResult<Self> {
        geometry::Medium::new(epsilon, mu).map(Self).map_err(geo_err)
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu()
    }

    #[getter]
    fn refractive_index(&self) -> f64 {
        self.0.refractive_index()
    }

    fn __repr__(&self) -> String {
        format!("Medium(epsilon={}, mu={})", self.0.epsilon(), self.0.mu())
    }
}

fn medium_or_vacuum(m: Option<PyRef<'_, PyMedium>>) -> geometry::Medium {
    m.map_or(geometry::Medium::VACUUM, |m| m.0)
}

/// Diagonal stress tensor `(rr, thetatheta, zz, w)` in natural units.
#[pyclass(frozen, skip_from_py_object, name = "StressTensor")]
#[derive(Clone, Copy)]
pub struct PyTensor(mode_sum::StressTensor);

#[pymethods]
impl PyTensor {
    #[getter]
    fn rr(&self) -> f64 {
        self.0.r_r
    }

    #[getter]
    fn thetatheta(&self) -> f64 {
        self.0.theta_theta
    }

    #[getter]
    fn zz(&self) -> f64 {
        self.0.z_z
    }

    #[getter]
    fn w(&self) -> f64 {
        self.0.energy_density
    }

    /// `(rr, thetatheta, zz, -w)`.
    fn diagonal(&self) -> (f64, f64, f64, f64) {
        let d = self.0.diagonal();
        (d[0], d[1], d[2], d[3])
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }

    fn __repr__(&self) -> String {
        let t = self.0;
        format!(
            "StressTensor(rr={:e}, thetatheta={:e}, zz={:e}, w={:e})",
            t.r_r, t.theta_theta, t.z_z, t.energy_density
        )
    }
}

/// Closed-form regularized tensor for the wedge of opening `alpha`.
#[pyfunction]
#[pyo3(signature = (alpha, r, medium = None))]
fn theta_tensor(alpha: f64, r: f64, medium: Option<PyRef<'_, PyMedium>>) -> PyResult<PyTensor> {
    let angle = WedgeAngle::new(alpha).map_err(geo_err)?;
    closed_form::theta_tensor(angle, &medium_or_vacuum(medium), r)
        .map(PyTensor)
        .map_err(geo_err)
}

/// Wall force per unit area; `r` in the length unit of `units`.
#[pyfunction]
#[pyo3(signature = (alpha, r, medium = None, units = "natural"))]
fn surface_force_density(
    alpha: f64,
    r: f64,
    medium: Option<PyRef<'_, PyMedium>>,
    units: &str,
) -> PyResult<f64> {
    let units: UnitSystem = units.parse().map_err(geo_err)?;
    let angle = WedgeAngle::new(alpha).map_err(geo_err)?;
    closed_form::surface_force_density(angle, &medium_or_vacuum(medium), r, units)
        .map(|s| s.value)
        .map_err(geo_err)
}

/// Regularized tensor from the point-split oracle. Returns the tensor and
/// its error estimate.
#[pyfunction]
#[pyo3(signature = (wedge, r, medium = None, theta = None, route = "images", rel_tol = None))]
fn regularized_tensor_oracle(
    py: Python<'_>,
    wedge: PyRef<'_, PyWedge>,
    r: f64,
    medium: Option<PyRef<'_, PyMedium>>,
    theta: Option<f64>,
    route: &str,
    rel_tol: Option<f64>,
) -> PyResult<(PyTensor, f64)> {
    let geom = wedge.0;
    let medium = medium_or_vacuum(medium);
    let route: OracleRoute = route.parse().map_err(PyValueError::new_err)?;
    let mut quad = QuadratureSpec::default();
    if let Some(t) = rel_tol {
        quad = quad.with_rel_tol(t);
    }
    let theta = theta.unwrap_or(0.5 * geom.alpha());
    let est = py
        .detach(|| {
            mode_sum::regularized_tensor_via(
                route,
                &geom,
                &medium,
                r,
                theta,
                &quad,
                &ExtrapolationSpec::default(),
            )
        })
        .map_err(to_py)?;
    Ok((PyTensor(est.tensor), est.err_estimate))
}

/// Closed-form Casimir-Polder potential: `(u, force_r, force_theta)`.
#[pyfunction]
#[pyo3(signature = (wedge, r, theta, alpha0 = 1.0, medium = None))]
fn polder_potential(
    wedge: PyRef<'_, PyWedge>,
    r: f64,
    theta: f64,
    alpha0: f64,
    medium: Option<PyRef<'_, PyMedium>>,
) -> PyResult<(f64, f64, f64)> {
    let dip = DipoleParams::new(alpha0).map_err(geo_err)?;
    let res = casimir_polder::u_closed(&wedge.0, &medium_or_vacuum(medium), &dip, r, theta)
        .map_err(to_py)?;
    Ok((res.u, res.force_r, res.force_theta))
}

/// Casimir-Polder potential from the extrapolated mode-sum oracle.
#[pyfunction]
#[pyo3(signature = (wedge, r, theta, alpha0 = 1.0, medium = None))]
fn polder_potential_oracle(
    py: Python<'_>,
    wedge: PyRef<'_, PyWedge>,
    r: f64,
    theta: f64,
    alpha0: f64,
    medium: Option<PyRef<'_, PyMedium>>,
) -> PyResult<f64> {
    let dip = DipoleParams::new(alpha0).map_err(geo_err)?;
    let geom = wedge.0;
    let medium = medium_or_vacuum(medium);
    py.detach(|| {
        casimir_polder::u_regularized_oracle(
            &geom,
            &medium,
            &dip,
            r,
            theta,
            &QuadratureSpec::default(),
            &ExtrapolationSpec::default(),
        )
    })
    .map_err(to_py)
}

/// Vacuum tensor around a cosmic string with deficit parameter `beta`.
#[pyfunction]
fn string_tensor(beta: f64, r: f64) -> PyResult<PyTensor> {
    let params = StringParams::from_beta(beta).map_err(geo_err)?;
    closed_form::string_tensor(&params, r)
        .map(PyTensor)
        .map_err(geo_err)
}

/// Runs the command-line interface; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    py.detach(|| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("casimir-wedge".to_string()).chain(args);
        let code = wedge_casimir::cli::run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8_lossy(&out).into_owned(),
            String::from_utf8_lossy(&err).into_owned(),
        )
    })
}

#[pymodule]
#[pyo3(name = "wedge_casimir")]
pub fn wedge_casimir_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWedge>()?;
    m.add_class::<PyMedium>()?;
    m.add_class::<PyTensor>()?;
    m.add_function(wrap_pyfunction!(theta_tensor, m)?)?;
    m.add_function(wrap_pyfunction!(surface_force_density, m)?)?;
    m.add_function(wrap_pyfunction!(regularized_tensor_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(polder_potential, m)?)?;
    m.add_function(wrap_pyfunction!(polder_potential_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(string_tensor, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
