//! Python bindings: networks, exact solutions, training and evaluation.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

use pinn_core::config::{Profile, ProblemName, RunConfig};
use pinn_core::diagnostics::run_self_checks;
use pinn_core::eval::{absolute_error_grid, comparison_table as core_comparison};
use pinn_core::nn::{self, layer_sizes, Activation, Network};
use pinn_core::pde::{self, exact_residual_probe, probe_points};
use pinn_core::pipeline::train_from_config;
use pinn_core::sampling::make_grid;
use pinn_core::PinnError;

fn to_py(e: PinnError) -> PyErr {
    match e {
        PinnError::Numerical(_) | PinnError::Singularity(_) => PyArithmeticError::new_err(e.to_string()),
        PinnError::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn config_for(problem: &str, profile: &str, config: Option<&str>) -> PyResult<RunConfig> {
    let name: ProblemName = problem.parse().map_err(to_py)?;
    let profile: Profile = profile.parse().map_err(to_py)?;
    RunConfig::from_toml_str(config.unwrap_or(""), Some(name), profile).map_err(to_py)
}

/// Feed-forward network `u(t, x)`.
#[pyclass(name = "Network", module = "pinn", skip_from_py_object)]
#[derive(Clone)]
struct PyNetwork {
    inner: Network,
}

#[pymethods]
impl PyNetwork {
    /// Glorot-initialized network with `hidden_layers` hidden layers of `width` units.
    #[new]
    #[pyo3(signature = (hidden_layers, width, activation = "gelu", seed = 0))]
    fn new(hidden_layers: usize, width: usize, activation: &str, seed: u64) -> PyResult<Self> {
        let act: Activation = activation.parse().map_err(to_py)?;
        let inner = Network::init_glorot(&layer_sizes(hidden_layers, width), act, seed).map_err(to_py)?;
        Ok(PyNetwork { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyNetwork {
            inner: nn::load_checkpoint(path).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        nn::save_checkpoint(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn sizes(&self) -> Vec<usize> {
        self.inner.sizes().to_vec()
    }

    #[getter]
    fn activation(&self) -> String {
        self.inner.activation().to_string()
    }

    #[getter]
    fn param_count(&self) -> usize {
        self.inner.param_count()
    }

    fn params(&self) -> Vec<f64> {
        self.inner.flat_params()
    }

    fn set_params(&mut self, params: Vec<f64>) -> PyResult<()> {
        self.inner.set_flat_params(&params).map_err(to_py)
    }

    fn predict(&self, t: f64, x: f64) -> f64 {
        self.inner.predict(t, x)
    }

    fn predict_many(&self, ts: Vec<f64>, xs: Vec<f64>) -> PyResult<Vec<f64>> {
        if ts.len() != xs.len() {
            return Err(PyValueError::new_err("ts and xs must have equal length"));
        }
        Ok(nn::predict_batch(&self.inner, &ts, &xs))
    }

    /// `(u, u_t, u_x, u_xx)` at `(t, x)`.
    fn jet(&self, t: f64, x: f64) -> PyResult<(f64, f64, f64, f64)> {
        let j = self.inner.forward_jet(t, x).map_err(to_py)?;
        Ok((j.val, j.dt, j.dx, j.dxx))
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(sizes={:?}, activation='{}', params={})",
            self.inner.sizes(),
            self.inner.activation(),
            self.inner.param_count()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (x, t, lam = 0.1))]
fn exact_nws(x: f64, t: f64, lam: f64) -> PyResult<f64> {
    pde::exact_nws(lam, x, t).map_err(to_py)
}

#[pyfunction]
fn exact_allen_cahn(x: f64, t: f64) -> f64 {
    pde::exact_allen_cahn(x, t)
}

#[pyfunction]
fn gelu(x: f64) -> f64 {
    nn::gelu(x)
}

/// Largest residual of the closed-form solution at `n` seeded points.
#[pyfunction]
#[pyo3(signature = (problem, n = 1000, seed = 1))]
fn exact_residual(problem: &str, n: usize, seed: u64) -> PyResult<f64> {
    let pde = config_for(problem, "paper", None)?.pde().map_err(to_py)?;
    exact_residual_probe(&pde, &probe_points(&pde, n, seed)).map_err(to_py)
}

/// Effective configuration as TOML text.
#[pyfunction]
#[pyo3(signature = (problem = "nws", profile = "paper"))]
fn default_config(problem: &str, profile: &str) -> PyResult<String> {
    config_for(problem, profile, None)?.to_toml_string().map_err(to_py)
}

/// Trains per the configuration; returns the network and the
/// `(iteration, lr, init, bound, res, total)` history.
#[pyfunction]
#[pyo3(signature = (problem = "nws", profile = "ci", config = None, seed = None, iterations = None))]
#[allow(clippy::type_complexity)]
fn train(
    py: Python<'_>,
    problem: &str,
    profile: &str,
    config: Option<&str>,
    seed: Option<u64>,
    iterations: Option<u64>,
) -> PyResult<(PyNetwork, Vec<(u64, f64, f64, f64, f64, f64)>)> {
    let mut cfg = config_for(problem, profile, config)?;
    if let Some(seed) = seed {
        cfg.sampling.seed = seed;
    }
    if let Some(n) = iterations {
        cfg.training.iterations = n;
    }
    cfg.training.log_every = 0;
    let (net, outcome) = py.detach(|| train_from_config(&cfg)).map_err(to_py)?;
    let history = outcome
        .history
        .iter()
        .map(|r| {
            let b = r.breakdown;
            (r.iteration, r.lr, b.init_loss, b.bound_loss, b.res_loss, b.total)
        })
        .collect();
    Ok((PyNetwork { inner: net }, history))
}

/// `(max_abs_error, [(t, l2)], [(t, linf)])` on a regular grid.
#[pyfunction]
#[pyo3(signature = (net, problem, h = 0.004, dt = 0.004))]
#[allow(clippy::type_complexity)]
fn evaluate(net: &PyNetwork, problem: &str, h: f64, dt: f64) -> PyResult<(f64, Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    let pde = config_for(problem, "paper", None)?.pde().map_err(to_py)?;
    let grid = make_grid(h, dt, &pde).map_err(to_py)?;
    let r = absolute_error_grid(&net.inner, &pde, &grid).map_err(to_py)?;
    Ok((r.max_abs_error, r.l2_by_t, r.linf_by_t))
}

/// Comparison with the published spline errors, rendered as text.
#[pyfunction]
fn comparison_table(net: &PyNetwork, problem: &str) -> PyResult<String> {
    let pde = config_for(problem, "paper", None)?.pde().map_err(to_py)?;
    Ok(core_comparison(&net.inner, &pde).map_err(to_py)?.render())
}

/// `(name, value, threshold, passed)` for each self-check.
#[pyfunction]
#[pyo3(signature = (seed = 1))]
fn self_check(seed: u64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    Ok(run_self_checks(seed)
        .map_err(to_py)?
        .into_iter()
        .map(|o| (o.name.to_string(), o.value, o.threshold, o.passed))
        .collect())
}

#[pymodule]
fn pinn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Adds every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_function(wrap_pyfunction!(exact_nws, m)?)?;
    m.add_function(wrap_pyfunction!(exact_allen_cahn, m)?)?;
    m.add_function(wrap_pyfunction!(gelu, m)?)?;
    m.add_function(wrap_pyfunction!(exact_residual, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(comparison_table, m)?)?;
    m.add_function(wrap_pyfunction!(self_check, m)?)?;
    Ok(())
}
