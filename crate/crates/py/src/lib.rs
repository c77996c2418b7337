//! Python bindings: a thin, copying wrapper over the core library's grids,
//! fields, propagators, functionals, and the scalar simulation driver.
//!
//! Build with `cargo build -p acsplit-py`, then rename the produced
//! `libacsplit_py.so` to `acsplit_py.so` (or `.pyd` on Windows) anywhere on
//! `sys.path`; `python/smoke_test.py` automates exactly that.

use acsplit::functionals::{self, NormKind};
use acsplit::problems;
use acsplit::propagators::{self, PotentialSpec};
use acsplit::stepper::{self, AdaptiveParams, SimConfig, StepPlan};
use acsplit::{Boundary, Error, Field, Grid};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_boundary(name: &str) -> PyResult<Boundary> {
    match name {
        "neumann" => Ok(Boundary::Neumann),
        "periodic" => Ok(Boundary::Periodic),
        other => Err(PyValueError::new_err(format!(
            "unknown boundary {other:?}; expected \"neumann\" or \"periodic\""
        ))),
    }
}

fn parse_potential(name: &str, theta: f64, theta_c: f64) -> PyResult<PotentialSpec> {
    match name {
        "poly" | "polynomial" => Ok(PotentialSpec::Polynomial),
        "log" | "logarithmic" => Ok(PotentialSpec::Logarithmic { theta, theta_c }),
        other => Err(PyValueError::new_err(format!(
            "unknown potential {other:?}; expected \"poly\" or \"log\""
        ))),
    }
}

fn parse_norm(kind: &str) -> PyResult<NormKind> {
    match kind {
        "l2" => Ok(NormKind::L2),
        "linf" => Ok(NormKind::Linf),
        _ => match kind.strip_prefix('h').and_then(|k| k.parse::<u32>().ok()) {
            Some(k) => Ok(NormKind::Hk(k)),
            None => Err(PyValueError::new_err(format!(
                "unknown norm {kind:?}; expected \"l2\", \"linf\", or \"h0\"..\"h6\""
            ))),
        },
    }
}

/// Collocation grid on [0, 2π]²: midpoint nodes under `"neumann"`, left
/// endpoints under `"periodic"`.
#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid {
    inner: Grid,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(nx: usize, ny: usize, boundary: &str) -> PyResult<Self> {
        let inner = Grid::new(nx, ny, parse_boundary(boundary)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx()
    }

    #[getter]
    fn ny(&self) -> usize {
        self.inner.ny()
    }

    #[getter]
    fn boundary(&self) -> &'static str {
        self.inner.boundary().name()
    }

    #[getter]
    fn hx(&self) -> f64 {
        self.inner.hx()
    }

    #[getter]
    fn hy(&self) -> f64 {
        self.inner.hy()
    }

    /// x-coordinate of node column `i`.
    fn node_x(&self, i: usize) -> f64 {
        self.inner.node_x(i)
    }

    /// y-coordinate of node row `j`.
    fn node_y(&self, j: usize) -> f64 {
        self.inner.node_y(j)
    }

    fn __repr__(&self) -> String {
        format!("Grid({}, {}, \"{}\")", self.inner.nx(), self.inner.ny(), self.inner.boundary().name())
    }
}

/// Real nodal field on a [`Grid`], stored row-major.
#[pyclass(name = "Field", frozen)]
struct PyField {
    inner: Field,
}

#[pymethods]
impl PyField {
    /// All-zero field.
    #[staticmethod]
    fn zeros(grid: &PyGrid) -> Self {
        Self { inner: Field::zeros(grid.inner) }
    }

    /// Constant field.
    #[staticmethod]
    fn constant(grid: &PyGrid, c: f64) -> Self {
        Self { inner: Field::constant(grid.inner, c) }
    }

    /// Field from a row-major list of `nx*ny` nodal values.
    #[staticmethod]
    fn from_values(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: Field::from_data(grid.inner, values).map_err(err)? })
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid { inner: self.inner.grid() }
    }

    /// Row-major copy of the nodal values.
    fn values(&self) -> Vec<f64> {
        self.inner.data().to_vec()
    }

    /// Value at node column `i`, row `j`.
    fn at(&self, i: usize, j: usize) -> f64 {
        self.inner.at(i, j)
    }

    fn max_norm(&self) -> f64 {
        self.inner.max_norm()
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn __repr__(&self) -> String {
        let g = self.inner.grid();
        format!("Field({}x{}, \"{}\")", g.nx(), g.ny(), g.boundary().name())
    }
}

/// Seven shrinking circles: the polynomial benchmark's initial datum.
#[pyfunction]
fn seven_circles(grid: &PyGrid, eps: f64) -> PyField {
    PyField { inner: problems::seven_circles(grid.inner, eps) }
}

/// Two-level disk indicator: the logarithmic benchmark's initial datum.
#[pyfunction]
fn disk_indicator(grid: &PyGrid) -> PyField {
    PyField { inner: problems::disk_indicator(grid.inner) }
}

/// Seeded random field with modes below `max_mode` and exact max-norm
/// `amplitude`.
#[pyfunction]
fn random_bandlimited(grid: &PyGrid, seed: u64, max_mode: usize, amplitude: f64) -> PyResult<PyField> {
    Ok(PyField { inner: problems::random_bandlimited(grid.inner, seed, max_mode, amplitude).map_err(err)? })
}

/// Diffusion semigroup e^{t·eps2·Δ} applied spectrally.
#[pyfunction]
fn linear_propagate(field: &PyField, t: f64, eps2: f64) -> PyResult<PyField> {
    Ok(PyField { inner: propagators::linear_propagate(&field.inner, t, eps2).map_err(err)? })
}

/// Closed-form flow of u' = u − u³ over one step τ.
#[pyfunction]
fn nonlinear_exact(field: &PyField, tau: f64) -> PyResult<PyField> {
    Ok(PyField { inner: propagators::nonlinear_exact(&field.inner, tau).map_err(err)? })
}

/// One Strang step S_L(τ/2)∘S_N(τ)∘S_L(τ/2) for a scalar potential.
#[pyfunction]
#[pyo3(signature = (field, tau, eps, potential = "poly", theta = 0.25, theta_c = 1.0))]
fn strang_step(
    field: &PyField,
    tau: f64,
    eps: f64,
    potential: &str,
    theta: f64,
    theta_c: f64,
) -> PyResult<PyField> {
    let pot = parse_potential(potential, theta, theta_c)?;
    let cfg = SimConfig::new(field.inner.grid(), pot, eps, StepPlan::Uniform { tau }, tau);
    Ok(PyField { inner: stepper::strang_step(&field.inner, tau, &cfg).map_err(err)? })
}

/// Free energy ∫ ε²/2 |∇u|² + F(u).
#[pyfunction]
#[pyo3(signature = (field, eps, potential = "poly", theta = 0.25, theta_c = 1.0))]
fn energy(field: &PyField, eps: f64, potential: &str, theta: f64, theta_c: f64) -> PyResult<f64> {
    let pot = parse_potential(potential, theta, theta_c)?;
    functionals::energy(&field.inner, &pot, eps).map_err(err)
}

/// Norm of a field: `"l2"`, `"linf"`, or `"h0"`..`"h6"`.
#[pyfunction]
#[pyo3(signature = (field, kind = "l2"))]
fn norm(field: &PyField, kind: &str) -> PyResult<f64> {
    functionals::norm(&field.inner, parse_norm(kind)?).map_err(err)
}

/// Exact quadrature of the field over the domain.
#[pyfunction]
fn mass(field: &PyField) -> f64 {
    functionals::mass(&field.inner)
}

/// Seeded positive step sizes normalized to sum to `t_final`.
#[pyfunction]
fn generate_random_steps(seed: u64, n_steps: usize, t_final: f64) -> PyResult<Vec<f64>> {
    stepper::generate_random_steps(seed, n_steps, t_final).map_err(err)
}

/// Runs a scalar trajectory to `t_final` and returns
/// `(final_field, rows)` with one `(t, tau, energy, max_norm)` tuple per
/// recorded step. Pass `tau` for uniform steps, or `tau_min`/`tau_max`
/// (optionally `alpha`) for the adaptive controller.
#[pyfunction]
#[pyo3(signature = (field, eps, t_final, *, potential = "poly", theta = 0.25, theta_c = 1.0,
                    tau = None, tau_min = None, tau_max = None, alpha = 100.0, record_every = 1))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    field: &PyField,
    eps: f64,
    t_final: f64,
    potential: &str,
    theta: f64,
    theta_c: f64,
    tau: Option<f64>,
    tau_min: Option<f64>,
    tau_max: Option<f64>,
    alpha: f64,
    record_every: usize,
) -> PyResult<(PyField, Vec<(f64, f64, f64, f64)>)> {
    let pot = parse_potential(potential, theta, theta_c)?;
    let plan = match (tau, tau_min, tau_max) {
        (Some(tau), None, None) => StepPlan::Uniform { tau },
        (None, Some(tau_min), Some(tau_max)) => {
            StepPlan::Adaptive(AdaptiveParams { tau_min, tau_max, alpha })
        }
        _ => {
            return Err(PyValueError::new_err(
                "pass either tau (uniform plan) or tau_min and tau_max (adaptive plan)",
            ))
        }
    };
    let mut cfg = SimConfig::new(field.inner.grid(), pot, eps, plan, t_final);
    cfg.record_every = record_every;
    let (u, trace) = stepper::run(&cfg, &field.inner).map_err(err)?;
    let rows = trace.rows.iter().map(|r| (r.t, r.tau, r.energy, r.max_norm)).collect();
    Ok((PyField { inner: u }, rows))
}

#[pymodule]
fn acsplit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(seven_circles, m)?)?;
    m.add_function(wrap_pyfunction!(disk_indicator, m)?)?;
    m.add_function(wrap_pyfunction!(random_bandlimited, m)?)?;
    m.add_function(wrap_pyfunction!(linear_propagate, m)?)?;
    m.add_function(wrap_pyfunction!(nonlinear_exact, m)?)?;
    m.add_function(wrap_pyfunction!(strang_step, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(mass, m)?)?;
    m.add_function(wrap_pyfunction!(generate_random_steps, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
