//! Python bindings: `import nc_hydrogen`.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nc_hydrogen::bounds::{self, ExperimentInput};
use nc_hydrogen::constants::PhysicalConstants;
use nc_hydrogen::corrections::{self, CorrectionMethod};
use nc_hydrogen::hydrogen::{self, QuantumState};
use nc_hydrogen::nc_model::{self, MomentOracle, NcParameters};
use nc_hydrogen::ns_series;
use nc_hydrogen::operator_oracle::{self, GridKind, RadialGrid};
use nc_hydrogen::specfun;
use nc_hydrogen::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_)
        | Error::InvalidState { .. }
        | Error::DivergentMoment { .. }
        | Error::DivergentCorrection { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn state(n: i64, l: i64, m: i64) -> PyResult<QuantumState> {
    QuantumState::new(n, l, m).map_err(py_err)
}

fn constants(path: Option<PathBuf>) -> PyResult<PhysicalConstants> {
    match path {
        None => Ok(PhysicalConstants::codata2018()),
        Some(p) => PhysicalConstants::from_path(&p).map_err(py_err),
    }
}

/// Strength of the noncommutativity; build with `from_alpha` or `from_t`.
#[pyclass(name = "NcParameters", frozen)]
struct PyNcParameters(NcParameters);

#[pymethods]
impl PyNcParameters {
    #[staticmethod]
    #[pyo3(signature = (alpha, planck_length_m=None, bohr_radius_m=None))]
    fn from_alpha(alpha: f64, planck_length_m: Option<f64>, bohr_radius_m: Option<f64>) -> PyResult<Self> {
        let c = PhysicalConstants::codata2018();
        NcParameters::from_alpha(
            alpha,
            planck_length_m.unwrap_or(c.planck_length_m),
            bohr_radius_m.unwrap_or(c.bohr_radius_m),
        )
        .map(Self)
        .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (t, planck_length_m=None, bohr_radius_m=None))]
    fn from_t(t: f64, planck_length_m: Option<f64>, bohr_radius_m: Option<f64>) -> PyResult<Self> {
        let c = PhysicalConstants::codata2018();
        NcParameters::from_t(
            t,
            planck_length_m.unwrap_or(c.planck_length_m),
            bohr_radius_m.unwrap_or(c.bohr_radius_m),
        )
        .map(Self)
        .map_err(py_err)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn theta2_mean(&self) -> f64 {
        self.0.theta2_mean()
    }

    #[getter]
    fn hbar_sqrt_theta2_m2(&self) -> f64 {
        self.0.hbar_sqrt_theta2_m2()
    }

    fn __repr__(&self) -> String {
        format!("NcParameters(alpha={:e}, t={:e})", self.0.alpha(), self.0.t())
    }
}

/// First-order shift per unit t², hartree.
#[pyclass(name = "CorrectionResult", frozen, get_all)]
struct PyCorrectionResult {
    n: u32,
    l: u32,
    m: i32,
    method: String,
    value: f64,
    bracket: f64,
    theta_l_squared: f64,
    kinetic_cross: f64,
    inv_r5: f64,
}

#[pymethods]
impl PyCorrectionResult {
    /// Shift in hartree at the given strength.
    fn energy(&self, nc: &PyNcParameters) -> f64 {
        self.value * nc.0.theta2_mean()
    }

    fn __repr__(&self) -> String {
        format!(
            "CorrectionResult(n={}, l={}, m={}, method={:?}, value={:e})",
            self.n, self.l, self.m, self.method, self.value
        )
    }
}

impl From<corrections::CorrectionResult> for PyCorrectionResult {
    fn from(r: corrections::CorrectionResult) -> Self {
        let method = match r.method {
            CorrectionMethod::ClosedForm => "closed",
            CorrectionMethod::Assembled => "assembled",
            CorrectionMethod::EffectiveHamiltonian => "effective",
        };
        Self {
            n: r.state.n(),
            l: r.state.l(),
            m: r.state.m(),
            method: method.into(),
            value: r.value,
            bracket: r.bracket(),
            theta_l_squared: r.terms.theta_l_squared,
            kinetic_cross: r.terms.kinetic_cross,
            inv_r5: r.terms.inv_r5,
        }
    }
}

#[pyclass(name = "SeriesReport", frozen, get_all)]
struct PySeriesReport {
    n: u32,
    beta: f64,
    value: f64,
    error: f64,
    truncation: usize,
    partial_sum: f64,
    flagged: bool,
    method: String,
    csv: String,
    /// (k, C_k, I_k, term)
    terms: Vec<(usize, f64, f64, f64)>,
}

#[pymethods]
impl PySeriesReport {
    fn __repr__(&self) -> String {
        format!(
            "SeriesReport(n={}, beta={}, value={}, error={:e}, K={}, flagged={})",
            self.n, self.beta, self.value, self.error, self.truncation, self.flagged
        )
    }
}

impl From<ns_series::SeriesReport> for PySeriesReport {
    fn from(r: ns_series::SeriesReport) -> Self {
        Self {
            n: r.n,
            beta: r.beta,
            value: r.value,
            error: r.error,
            truncation: r.truncation,
            partial_sum: r.partial_sum,
            flagged: r.flagged,
            method: format!("{:?}", r.acceleration.method),
            csv: r.to_csv(15),
            terms: r.terms.iter().map(|t| (t.k, t.c, t.i, t.contribution)).collect(),
        }
    }
}

#[pyclass(name = "OracleResult", frozen, get_all)]
struct PyOracleResult {
    beta: f64,
    n: u32,
    value: f64,
    error: f64,
    coarse: f64,
    fine: f64,
    points: usize,
    rho_max: f64,
    resolution_warning: bool,
}

#[pymethods]
impl PyOracleResult {
    fn __repr__(&self) -> String {
        format!(
            "OracleResult(n={}, beta={}, value={}, error={:e})",
            self.n, self.beta, self.value, self.error
        )
    }
}

#[pyclass(name = "BoundResult", frozen, get_all)]
struct PyBoundResult {
    rel_uncertainty: f64,
    coefficient: f64,
    t_bound: f64,
    hbar_sqrt_theta2_bound_m2: f64,
    alpha_bound: f64,
    bohr_radius_m: f64,
    planck_length_m: f64,
    constants_label: String,
}

#[pymethods]
impl PyBoundResult {
    fn __repr__(&self) -> String {
        format!(
            "BoundResult(hbar_sqrt_theta2_bound_m2={:e}, alpha_bound={:e})",
            self.hbar_sqrt_theta2_bound_m2, self.alpha_bound
        )
    }
}

/// Unperturbed energy -1/(2n²) in hartree.
#[pyfunction]
fn energy0(n: i64) -> PyResult<f64> {
    hydrogen::energy0(n).map_err(py_err)
}

/// Closed-form ⟨r^-k⟩ for k in 1..=5, atomic units.
#[pyfunction]
fn inv_r_moment(n: i64, l: i64, k: u32) -> PyResult<f64> {
    hydrogen::inv_r_moment_closed(state(n, l, 0)?, k).map_err(py_err)
}

/// ⟨r^-k⟩ by adaptive quadrature of the radial density.
#[pyfunction]
fn inv_r_moment_quadrature(n: i64, l: i64, k: i32) -> PyResult<f64> {
    hydrogen::expectation_quadrature(state(n, l, 0)?, |r| r.powi(-k))
        .map(|q| q.value)
        .map_err(py_err)
}

/// `method`: "closed", "assembled" or "effective".
#[pyfunction]
#[pyo3(signature = (n, l, m=0, method="closed"))]
fn delta_e1(n: i64, l: i64, m: i64, method: &str) -> PyResult<PyCorrectionResult> {
    let s = state(n, l, m)?;
    let r = match method {
        "closed" => corrections::delta_e1_closed(s),
        "assembled" => corrections::delta_e1_assembled(s),
        "effective" => corrections::delta_e1_effective(s),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method {other:?}; use closed, assembled or effective"
            )))
        }
    };
    r.map(Into::into).map_err(py_err)
}

/// Oscillator-excitation channel of second order, hartree; `omega` in rad/s.
#[pyfunction]
fn second_order_oscillator_channel(n: i64, l: i64, m: i64, omega: f64, nc: &PyNcParameters) -> PyResult<f64> {
    corrections::second_order_oscillator_channel(state(n, l, m)?, omega, &nc.0).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (beta, n=1, k=ns_series::DEFAULT_K))]
fn s_ns(py: Python<'_>, beta: f64, n: u32, k: usize) -> PyResult<PySeriesReport> {
    py.detach(|| ns_series::s_ns(beta, n, k)).map(Into::into).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (k=ns_series::DEFAULT_K))]
fn s_1s0_closed(py: Python<'_>, k: usize) -> PyResult<PySeriesReport> {
    py.detach(|| ns_series::s_1s0_closed(k)).map(Into::into).map_err(py_err)
}

/// Grid evaluation of S_ns(β); `kappa = 0` selects a uniform grid.
#[pyfunction]
#[pyo3(signature = (beta, n=1, points=2000, rho_max=12.0, kappa=6.0))]
fn s_ns_oracle(py: Python<'_>, beta: f64, n: u32, points: usize, rho_max: f64, kappa: f64) -> PyResult<PyOracleResult> {
    let kind = if kappa == 0.0 {
        GridKind::Uniform
    } else {
        GridKind::Sinh { kappa }
    };
    let grid = RadialGrid::new(rho_max, points, kind).map_err(py_err)?;
    let r = py.detach(|| operator_oracle::s_ns_oracle(beta, n, &grid)).map_err(py_err)?;
    Ok(PyOracleResult {
        beta: r.beta,
        n: r.n,
        value: r.value,
        error: r.error,
        coarse: r.coarse,
        fine: r.fine,
        points: r.points,
        rho_max: r.rho_max,
        resolution_warning: r.resolution_warning,
    })
}

/// Leading-order ns shift in hartree.
#[pyfunction]
fn delta_e_ns(n: u32, nc: &PyNcParameters) -> PyResult<f64> {
    ns_series::delta_e_ns(n, &nc.0).map_err(py_err)
}

#[pyfunction]
fn relative_shift_coefficient() -> f64 {
    bounds::relative_shift_coefficient()
}

#[pyfunction]
#[pyo3(signature = (rel_uncertainty, frequency_hz=None, constants_path=None))]
fn bound_from_uncertainty(
    rel_uncertainty: f64,
    frequency_hz: Option<f64>,
    constants_path: Option<PathBuf>,
) -> PyResult<PyBoundResult> {
    let mut input = ExperimentInput::default().with_uncertainty(rel_uncertainty);
    if let Some(f) = frequency_hz {
        input.frequency_hz = f;
    }
    let b = bounds::bound_from_uncertainty(&input, &constants(constants_path)?).map_err(py_err)?;
    Ok(PyBoundResult {
        rel_uncertainty: b.rel_uncertainty,
        coefficient: b.coefficient,
        t_bound: b.t_bound,
        hbar_sqrt_theta2_bound_m2: b.hbar_sqrt_theta2_bound_m2,
        alpha_bound: b.alpha_bound,
        bohr_radius_m: b.bohr_radius_m,
        planck_length_m: b.planck_length_m,
        constants_label: b.constants_label,
    })
}

/// Second-moment tensor ⟨θ_i θ_j⟩ in units α = ħ = l_p = 1 (exact: δ_ij/2).
#[pyfunction]
#[pyo3(signature = (method="gauss_hermite", nodes=3, samples=100_000, seed=0))]
fn moment_tensor(method: &str, nodes: usize, samples: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let m = match method {
        "gauss_hermite" => MomentOracle::GaussHermite { nodes },
        "monte_carlo" => MomentOracle::MonteCarlo { samples, seed },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method {other:?}; use gauss_hermite or monte_carlo"
            )))
        }
    };
    let t = nc_model::moment_tensor_oracle(m).map_err(py_err)?;
    Ok(t.second_moment.iter().map(|r| r.to_vec()).collect())
}

#[pyfunction]
fn laguerre(n: u32, a: f64, x: f64) -> f64 {
    specfun::laguerre(n, a, x)
}

/// ₂F₁(-k, 1/2; 3/2; 2) as an exact "p/q" string.
#[pyfunction]
fn hyp2f1_terminating(k: u32) -> String {
    let r = specfun::hyp2f1_terminating(k);
    format!("{}/{}", r.numer(), r.denom())
}

#[pymodule]
#[pyo3(name = "nc_hydrogen")]
fn nc_hydrogen_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("S1S0", ns_series::S1S0)?;
    m.add_class::<PyNcParameters>()?;
    m.add_class::<PyCorrectionResult>()?;
    m.add_class::<PySeriesReport>()?;
    m.add_class::<PyOracleResult>()?;
    m.add_class::<PyBoundResult>()?;
    m.add_function(wrap_pyfunction!(energy0, m)?)?;
    m.add_function(wrap_pyfunction!(inv_r_moment, m)?)?;
    m.add_function(wrap_pyfunction!(inv_r_moment_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(delta_e1, m)?)?;
    m.add_function(wrap_pyfunction!(second_order_oscillator_channel, m)?)?;
    m.add_function(wrap_pyfunction!(s_ns, m)?)?;
    m.add_function(wrap_pyfunction!(s_1s0_closed, m)?)?;
    m.add_function(wrap_pyfunction!(s_ns_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(delta_e_ns, m)?)?;
    m.add_function(wrap_pyfunction!(relative_shift_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(bound_from_uncertainty, m)?)?;
    m.add_function(wrap_pyfunction!(moment_tensor, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre, m)?)?;
    m.add_function(wrap_pyfunction!(hyp2f1_terminating, m)?)?;
    Ok(())
}
