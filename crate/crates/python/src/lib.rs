use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use laser_entropy::fock::{self, CoherentAmplitude};
use laser_entropy::spectral::{self, Discretization, SpectralConfig};
use laser_entropy::stochastic::{self, PathConfig};
use laser_entropy::{thermal, BeamParams, Coherence, PhysicalConstants, UnitSystem};

fn to_py(e: laser_entropy::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn constants(natural_units: bool) -> PhysicalConstants {
    PhysicalConstants::from_mode(if natural_units { UnitSystem::Natural } else { UnitSystem::Si })
}

fn finite(c: Coherence) -> Option<f64> {
    match c {
        Coherence::Finite(x) => Some(x),
        Coherence::Infinite => None,
    }
}

fn spectral_config(grid: usize, method: &str) -> PyResult<SpectralConfig> {
    let discretization = match method {
        "fd" => Discretization::FiniteDifference,
        "fourier" => Discretization::FourierCosine,
        other => return Err(PyValueError::new_err(format!("method must be 'fd' or 'fourier', got {other:?}"))),
    };
    let config = SpectralConfig { grid_points: grid, discretization };
    config.validate().map_err(to_py)?;
    Ok(config)
}

#[pyclass(frozen, module = "laser_entropy_py")]
struct Beam {
    inner: BeamParams,
}

#[pymethods]
impl Beam {
    /// Beam from photon flow (1/s), linewidth (1/s) and carrier angular frequency (rad/s).
    #[new]
    fn new(photon_flow: f64, linewidth: f64, centre_frequency: f64) -> PyResult<Self> {
        let inner = laser_entropy::beam_from_rates(photon_flow, linewidth, centre_frequency).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_cavity(kappa: f64, mu: f64, centre_frequency: f64) -> PyResult<Self> {
        let inner = laser_entropy::beam_from_cavity(kappa, mu, centre_frequency).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn photon_flow(&self) -> f64 {
        self.inner.photon_flow()
    }

    #[getter]
    fn linewidth(&self) -> f64 {
        self.inner.linewidth()
    }

    #[getter]
    fn centre_frequency(&self) -> f64 {
        self.inner.centre_frequency()
    }

    /// `4Ṅ/ℓ`, or None for zero linewidth.
    #[getter]
    fn coherence(&self) -> Option<f64> {
        finite(self.inner.coherence())
    }

    #[getter]
    fn q_factor(&self) -> Option<f64> {
        finite(self.inner.q_factor())
    }

    #[pyo3(signature = (natural_units = false))]
    fn power(&self, natural_units: bool) -> f64 {
        self.inner.power(&constants(natural_units))
    }

    fn advisories(&self) -> Vec<String> {
        self.inner.advisories().iter().map(|a| format!("{a:?}")).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Beam(photon_flow={:e}, linewidth={:e}, centre_frequency={:e})",
            self.inner.photon_flow(),
            self.inner.linewidth(),
            self.inner.centre_frequency()
        )
    }
}

#[pyclass(frozen, get_all, module = "laser_entropy_py")]
struct GroundState {
    reduced_eigenvalue: f64,
    residual_norm: f64,
    long_time_prefactor: f64,
    grid_points: usize,
    eigenfunction: Vec<f64>,
}

#[pyclass(frozen, get_all, module = "laser_entropy_py")]
struct DecayFit {
    lambda_hat: f64,
    stderr: f64,
    r_squared: f64,
    intercept: f64,
    times: Vec<f64>,
    u_mean: Vec<f64>,
    u_stderr: Vec<f64>,
}

#[pyclass(frozen, get_all, module = "laser_entropy_py")]
struct Comparison {
    laser_s2: f64,
    thermal_s2: f64,
    ratio: f64,
    equivalent_temperature: f64,
}

/// `k_B√(Ṅℓ)` in W/K (or k_B = 1 units).
#[pyfunction]
#[pyo3(signature = (beam, natural_units = false))]
fn asymptotic_entropy_flow(beam: &Beam, natural_units: bool) -> f64 {
    laser_entropy::asymptotic_entropy_flow(&beam.inner, &constants(natural_units)).watts_per_kelvin()
}

#[pyfunction]
#[pyo3(signature = (beam, grid = 2048, method = "fd", natural_units = false))]
fn entropy_flow_spectral(beam: &Beam, grid: usize, method: &str, natural_units: bool) -> PyResult<f64> {
    let config = spectral_config(grid, method)?;
    let flow = spectral::entropy_flow_spectral(&beam.inner, &config, &constants(natural_units)).map_err(to_py)?;
    Ok(flow.watts_per_kelvin())
}

/// `λ̃₀ = λ₀/√(Ṅℓ)` at coherence `c`.
#[pyfunction]
#[pyo3(signature = (coherence, grid = 2048, method = "fd"))]
fn reduced_ground_eigenvalue(coherence: f64, grid: usize, method: &str) -> PyResult<GroundState> {
    let config = spectral_config(grid, method)?;
    let g = spectral::reduced_ground_eigenvalue(coherence, &config).map_err(to_py)?;
    Ok(GroundState {
        reduced_eigenvalue: g.reduced_eigenvalue,
        residual_norm: g.residual_norm,
        long_time_prefactor: g.long_time_prefactor,
        grid_points: g.grid_points,
        eigenfunction: g.eigenfunction,
    })
}

#[pyfunction]
#[pyo3(signature = (coherence, grid = 2048))]
fn richardson_reduced_eigenvalue(coherence: f64, grid: usize) -> PyResult<f64> {
    spectral::richardson_reduced_eigenvalue(coherence, grid).map_err(to_py)
}

/// Feynman–Kac Monte Carlo estimate of `λ̃₀`.
#[pyfunction]
#[pyo3(signature = (coherence, paths = 100_000, seed = 0, step = 0.01, window = (2.0, 6.0), sample_interval = 0.1))]
fn estimate_decay_rate(
    py: Python<'_>,
    coherence: f64,
    paths: usize,
    seed: u64,
    step: f64,
    window: (f64, f64),
    sample_interval: f64,
) -> PyResult<DecayFit> {
    let config = PathConfig { step, horizon: window.1, n_paths: paths, seed, ..PathConfig::default() };
    let (curve, fit) = py
        .detach(|| stochastic::estimate_decay_rate(&config, coherence, sample_interval, window))
        .map_err(to_py)?;
    Ok(DecayFit {
        lambda_hat: fit.lambda_hat,
        stderr: fit.stderr,
        r_squared: fit.r_squared,
        intercept: fit.intercept,
        times: curve.times,
        u_mean: curve.u_mean,
        u_stderr: curve.u_stderr,
    })
}

/// Purity of `segments` equal pieces of duration `duration` (s): (mean, stderr).
#[pyfunction]
#[pyo3(signature = (beam, segments, duration, samples = 100_000, seed = 0))]
fn segment_purity_mc(
    py: Python<'_>,
    beam: &Beam,
    segments: usize,
    duration: f64,
    samples: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let inner = beam.inner;
    let est = py
        .detach(|| stochastic::segment_purity_mc(&inner, segments, duration, samples, seed))
        .map_err(to_py)?;
    Ok((est.mean, est.stderr))
}

/// `|⟨α|β⟩|²` for amplitudes given in polar form.
#[pyfunction]
fn coherent_overlap_sq(r_a: f64, phase_a: f64, r_b: f64, phase_b: f64) -> PyResult<f64> {
    let a = CoherentAmplitude::new(r_a, phase_a).map_err(to_py)?;
    let b = CoherentAmplitude::new(r_b, phase_b).map_err(to_py)?;
    Ok(fock::coherent_overlap_sq(&a, &b))
}

/// `Tr ρ²` of a coherent state with normally distributed phase.
#[pyfunction]
#[pyo3(signature = (r, phase_variance, n_grid = 64, n_max = None))]
fn phase_averaged_purity(r: f64, phase_variance: f64, n_grid: usize, n_max: Option<usize>) -> PyResult<f64> {
    let n_max = n_max.unwrap_or_else(|| fock::default_n_max(r));
    let rho = fock::phase_averaged_state(r, phase_variance, n_grid, n_max).map_err(to_py)?;
    Ok(rho.purity())
}

#[pyfunction]
fn single_segment_purity_quadrature(r: f64, phase_difference_variance: f64) -> PyResult<f64> {
    fock::single_segment_purity_quadrature(r, phase_difference_variance).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (r, segment_phase_variance, segments, n_max = 40))]
fn multi_segment_purity(r: f64, segment_phase_variance: f64, segments: usize, n_max: usize) -> PyResult<f64> {
    fock::multi_segment_purity(r, segment_phase_variance, segments, n_max).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (temperature, natural_units = false))]
fn thermal_power(temperature: f64, natural_units: bool) -> PyResult<f64> {
    thermal::thermal_power(temperature, &constants(natural_units)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (temperature, natural_units = false))]
fn thermal_entropy_flow_renyi2(temperature: f64, natural_units: bool) -> PyResult<f64> {
    thermal::thermal_entropy_flow_renyi2(temperature, &constants(natural_units)).map_err(to_py)
}

/// Laser and thermal Rényi-2 entropy flows at equal power `power` (W).
#[pyfunction]
#[pyo3(signature = (power, q_factor, natural_units = false))]
fn compare_laser_thermal(power: f64, q_factor: f64, natural_units: bool) -> PyResult<Comparison> {
    let c = thermal::compare_laser_thermal(power, q_factor, &constants(natural_units)).map_err(to_py)?;
    Ok(Comparison {
        laser_s2: c.laser_s2,
        thermal_s2: c.thermal_s2,
        ratio: c.ratio,
        equivalent_temperature: c.equivalent_temperature,
    })
}

#[pymodule]
fn laser_entropy_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Beam>()?;
    m.add_class::<GroundState>()?;
    m.add_class::<DecayFit>()?;
    m.add_class::<Comparison>()?;
    m.add_function(wrap_pyfunction!(asymptotic_entropy_flow, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_flow_spectral, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_ground_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(richardson_reduced_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(segment_purity_mc, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_overlap_sq, m)?)?;
    m.add_function(wrap_pyfunction!(phase_averaged_purity, m)?)?;
    m.add_function(wrap_pyfunction!(single_segment_purity_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(multi_segment_purity, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_power, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_entropy_flow_renyi2, m)?)?;
    m.add_function(wrap_pyfunction!(compare_laser_thermal, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
