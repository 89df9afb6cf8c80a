use std::f64::consts::PI;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use laser_entropy::fock::{
    default_n_max, multi_segment_purity, phase_averaged_state, single_segment_purity_quadrature,
    uniform_phase_purity,
};
use laser_entropy::spectral::{
    entropy_flow_spectral, reduced_ground_eigenvalue, richardson_reduced_eigenvalue, Discretization,
    SpectralConfig, DEFAULT_GRID_POINTS,
};
use laser_entropy::stochastic::{estimate_decay_rate, segment_purity_mc, PathConfig, DEFAULT_FIT_WINDOW, DEFAULT_STEP};
use laser_entropy::thermal::{self, ThermalBeam};
use laser_entropy::{
    asymptotic_entropy_flow, asymptotic_entropy_flow_power_form, beam_from_cavity, beam_from_rates,
    heuristic_branching, reduce, BeamParams, Coherence, PhysicalConstants, UnitSystem,
};

use crate::error::CliError;
use crate::params::{Method, Resolver};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;
const DEFAULT_WAVELENGTH_NM: f64 = 1064.0;
const DEFAULT_PATHS: usize = 100_000;
const DEFAULT_SAMPLE_INTERVAL: f64 = 0.1;
const DEFAULT_PHASE_GRID: usize = 64;
const CROSSCHECK_SIGMA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// k_B√(Ṅℓ) and the branching heuristic.
    Asymptotic,
    /// Lowest eigenvalue of the reduced operator.
    Spectral,
    /// Feynman–Kac Monte Carlo decay rate.
    Montecarlo,
    /// Number-basis purities against quadrature and segment sampling.
    Brute,
    /// One-dimensional blackbody beam.
    Thermal,
    /// Laser against thermal entropy flow at equal power.
    Compare,
    /// Monte Carlo against spectral decay rate.
    Crosscheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Asymptotic => "asymptotic",
            Command::Spectral => "spectral",
            Command::Montecarlo => "montecarlo",
            Command::Brute => "brute",
            Command::Thermal => "thermal",
            Command::Compare => "compare",
            Command::Crosscheck => "crosscheck",
        }
    }
}

/// Tabular part of an artifact, written as the CSV body when present.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    /// A cross-check ran but did not pass.
    pub failed: bool,
}

impl Outcome {
    fn plain(result: Value) -> Self {
        Self { result, table: None, failed: false }
    }
}

pub fn run(command: Command, r: &mut Resolver) -> Result<Outcome, CliError> {
    match command {
        Command::Asymptotic => asymptotic(r),
        Command::Spectral => spectral(r),
        Command::Montecarlo => montecarlo(r),
        Command::Brute => brute(r),
        Command::Thermal => thermal_beam(r),
        Command::Compare => compare(r),
        Command::Crosscheck => crosscheck(r),
    }
}

fn constants(r: &mut Resolver) -> PhysicalConstants {
    let mode = if r.flag("natural-units") { UnitSystem::Natural } else { UnitSystem::Si };
    PhysicalConstants::from_mode(mode)
}

fn centre_frequency(r: &mut Resolver) -> Result<f64, CliError> {
    if r.has("centre-frequency") {
        return r.f64_req("centre-frequency");
    }
    let nm = r.f64_or("wavelength-nm", DEFAULT_WAVELENGTH_NM)?;
    if !(nm.is_finite() && nm > 0.0) {
        return Err(CliError::config("wavelength-nm", format!("must be positive, got {nm}")));
    }
    Ok(2.0 * PI * SPEED_OF_LIGHT / (nm * 1e-9))
}

fn beam(r: &mut Resolver) -> Result<BeamParams, CliError> {
    let omega = centre_frequency(r)?;
    if r.has("kappa") || r.has("mu") {
        let kappa = r.f64_req("kappa")?;
        let mu = r.f64_req("mu")?;
        return Ok(beam_from_cavity(kappa, mu, omega)?);
    }
    let n = r.f64_req("photon-flow")?;
    let l = r.f64_req("linewidth")?;
    Ok(beam_from_rates(n, l, omega)?)
}

fn finite_or_null(c: Coherence) -> Value {
    match c {
        Coherence::Finite(x) => json!(x),
        Coherence::Infinite => Value::Null,
    }
}

fn beam_json(b: &BeamParams) -> Value {
    json!({
        "photon_flow": b.photon_flow(),
        "linewidth": b.linewidth(),
        "centre_frequency": b.centre_frequency(),
        "coherence": finite_or_null(b.coherence()),
        "q_factor": finite_or_null(b.q_factor()),
    })
}

fn extend(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        t.extend(e);
    }
}

enum Source {
    Coherence(f64),
    Beam(BeamParams),
}

fn source(r: &mut Resolver) -> Result<Source, CliError> {
    if r.has("coherence") {
        let c = r.f64_req("coherence")?;
        if !(c.is_finite() && c > 0.0) {
            return Err(CliError::config("coherence", format!("must be finite and positive, got {c}")));
        }
        return Ok(Source::Coherence(c));
    }
    if !(r.has("photon-flow") || r.has("kappa") || r.has("mu")) {
        return Err(CliError::config("coherence", "required (or give a beam via --photon-flow/--linewidth)"));
    }
    Ok(Source::Beam(beam(r)?))
}

fn asymptotic(r: &mut Resolver) -> Result<Outcome, CliError> {
    let constants = constants(r);
    let b = beam(r)?;
    let s = asymptotic_entropy_flow(&b, &constants);
    let power_form = asymptotic_entropy_flow_power_form(&b, &constants);
    let heuristic = match heuristic_branching(&b, &constants) {
        Ok(h) => json!({
            "segment_duration": h.segment_duration,
            "segment_amplitude": h.segment_amplitude,
            "phase_step": h.phase_step,
            "amplitude_displacement": h.amplitude_displacement,
            "S2_W_per_K": h.heuristic_rate.watts_per_kelvin(),
            "S2_log2_W_per_K": h.heuristic_rate_log2.watts_per_kelvin(),
        }),
        Err(_) => Value::Null,
    };
    let mut result = beam_json(&b);
    extend(
        &mut result,
        json!({
            "power_W": b.power(&constants),
            "S2_per_kB_per_s": s.per_kb_per_s(),
            "S2_W_per_K": s.watts_per_kelvin(),
            "S2_power_form_W_per_K": power_form.watts_per_kelvin(),
            "advisories": b.advisories(),
            "heuristic": heuristic,
        }),
    );
    Ok(Outcome::plain(result))
}

fn spectral_config(r: &mut Resolver) -> Result<SpectralConfig, CliError> {
    let grid = r.count_or("grid", DEFAULT_GRID_POINTS)?;
    let discretization = match r.method()? {
        Method::Fd => Discretization::FiniteDifference,
        Method::Fourier => Discretization::FourierCosine,
    };
    let config = SpectralConfig { grid_points: grid, discretization };
    config.validate().map_err(CliError::from)?;
    Ok(config)
}

fn spectral(r: &mut Resolver) -> Result<Outcome, CliError> {
    let constants = constants(r);
    let config = spectral_config(r)?;
    let src = source(r)?;
    let (coherence, mut result) = match src {
        Source::Coherence(c) => (c, json!({ "coherence": c })),
        Source::Beam(b) => {
            let s = entropy_flow_spectral(&b, &config, &constants)?;
            let mut out = beam_json(&b);
            extend(
                &mut out,
                json!({
                    "S2_per_kB_per_s": s.per_kb_per_s(),
                    "S2_W_per_K": s.watts_per_kelvin(),
                    "asymptotic_S2_W_per_K": asymptotic_entropy_flow(&b, &constants).watts_per_kelvin(),
                }),
            );
            if b.photon_flow() == 0.0 || b.linewidth() == 0.0 {
                extend(&mut out, json!({ "lambda_tilde": Value::Null }));
                return Ok(Outcome::plain(out));
            }
            (reduce(&b)?.coherence, out)
        }
    };
    let ground = reduced_ground_eigenvalue(coherence, &config)?;
    let richardson = match config.discretization {
        Discretization::FiniteDifference => json!(richardson_reduced_eigenvalue(coherence, config.grid_points)?),
        Discretization::FourierCosine => Value::Null,
    };
    extend(
        &mut result,
        json!({
            "coherence": coherence,
            "epsilon": (4.0 * coherence).powf(-0.25),
            "grid_points": ground.grid_points,
            "lambda_tilde": ground.reduced_eigenvalue,
            "lambda_tilde_richardson": richardson,
            "residual_norm": ground.residual_norm,
            "long_time_prefactor": ground.long_time_prefactor,
        }),
    );
    Ok(Outcome::plain(result))
}

fn path_config(r: &mut Resolver) -> Result<(PathConfig, f64, (f64, f64)), CliError> {
    let n_paths = r.count_or("paths", DEFAULT_PATHS)?;
    let seed = r.seed()?;
    let step = r.f64_or("step", DEFAULT_STEP)?;
    let window = (
        r.f64_or("window-start", DEFAULT_FIT_WINDOW.0)?,
        r.f64_or("window-end", DEFAULT_FIT_WINDOW.1)?,
    );
    let horizon = r.f64_or("horizon", window.1)?;
    let interval = r.f64_or("sample-interval", DEFAULT_SAMPLE_INTERVAL)?;
    if !(interval.is_finite() && interval > 0.0) {
        return Err(CliError::config("sample-interval", format!("must be positive, got {interval}")));
    }
    let antithetic = r.flag("antithetic");
    let config = PathConfig { step, horizon, n_paths, seed, antithetic, ..PathConfig::default() };
    Ok((config, interval, window))
}

fn reduced_coherence(src: &Source) -> Result<f64, CliError> {
    match src {
        Source::Coherence(c) => Ok(*c),
        Source::Beam(b) if b.photon_flow() == 0.0 => {
            Err(CliError::config("photon-flow", "zero photon flow leaves no decay rate to estimate"))
        }
        Source::Beam(b) if b.linewidth() == 0.0 => {
            Err(CliError::config("linewidth", "zero linewidth leaves no decay rate to estimate"))
        }
        Source::Beam(b) => Ok(reduce(b)?.coherence),
    }
}

fn montecarlo(r: &mut Resolver) -> Result<Outcome, CliError> {
    let constants = constants(r);
    let src = source(r)?;
    let coherence = reduced_coherence(&src)?;
    let (config, interval, window) = path_config(r)?;
    let (curve, fit) = estimate_decay_rate(&config, coherence, interval, window)?;
    let mut result = match &src {
        Source::Coherence(_) => json!({}),
        Source::Beam(b) => {
            let rate = reduce(b)?.decay_rate_from_reduced(fit.lambda_hat);
            let mut out = beam_json(b);
            extend(
                &mut out,
                json!({
                    "S2_per_kB_per_s": rate,
                    "S2_W_per_K": rate * constants.boltzmann,
                }),
            );
            out
        }
    };
    extend(
        &mut result,
        json!({
            "coherence": coherence,
            "lambda_hat": fit.lambda_hat,
            "stderr": fit.stderr,
            "stderr_method": fit.stderr_method,
            "r_squared": fit.r_squared,
            "intercept": fit.intercept,
            "fit_window": [fit.fit_window.0, fit.fit_window.1],
            "n_points": fit.n_points,
            "n_paths": curve.n_paths,
            "n_observations": curve.n_observations,
            "curve": {
                "t_reduced": curve.times,
                "u_mean": curve.u_mean,
                "u_stderr": curve.u_stderr,
            },
        }),
    );
    let table = Table {
        header: vec!["t_reduced".into(), "u_mean".into(), "u_stderr".into()],
        rows: (0..curve.times.len())
            .map(|i| vec![json!(curve.times[i]), json!(curve.u_mean[i]), json!(curve.u_stderr[i])])
            .collect(),
    };
    Ok(Outcome { result, table: Some(table), failed: false })
}

fn brute(r: &mut Resolver) -> Result<Outcome, CliError> {
    let amp = r.f64_req("amplitude")?;
    let v = r.f64_req("phase-variance")?;
    if !(amp.is_finite() && amp >= 0.0) {
        return Err(CliError::config("amplitude", format!("must be finite and non-negative, got {amp}")));
    }
    if !(v.is_finite() && v >= 0.0) {
        return Err(CliError::config("phase-variance", format!("must be finite and non-negative, got {v}")));
    }
    let segments = r.count_or("segments", 1)?;
    let n_max = r.count_or("n-max", default_n_max(amp))?;
    let n_grid = r.count_or("n-grid", DEFAULT_PHASE_GRID)?;
    let n_paths = r.count_or("paths", DEFAULT_PATHS)?;
    let seed = r.seed()?;

    let mut result = json!({
        "amplitude": amp,
        "phase_variance": v,
        "segments": segments,
        "purity_uniform_phase": uniform_phase_purity(amp),
    });
    if segments == 1 {
        let rho = phase_averaged_state(amp, v, n_grid, n_max)?;
        extend(
            &mut result,
            json!({
                "purity_density_matrix": rho.purity(),
                "renyi2_density_matrix": rho.renyi2_entropy(),
                "trace": rho.trace(),
                "truncation_deficit": rho.truncation_deficit(),
                "purity_quadrature": single_segment_purity_quadrature(amp, 2.0 * v)?,
            }),
        );
    }
    let exact = if (1..=3).contains(&segments) && amp * amp <= 4.0 {
        json!(multi_segment_purity(amp, v, segments, n_max)?)
    } else {
        Value::Null
    };
    // unit segment duration: Ṅ = r², ℓ = v; the carrier frequency plays no role
    let unit_beam = beam_from_rates(amp * amp, v, 1.0)?;
    let mc = segment_purity_mc(&unit_beam, segments, segments as f64, n_paths, seed)?;
    extend(
        &mut result,
        json!({
            "purity_exact": exact,
            "purity_mc": mc.mean,
            "purity_mc_stderr": mc.stderr,
            "n_paths": mc.n,
            "renyi2_mc": -mc.mean.ln(),
        }),
    );
    Ok(Outcome::plain(result))
}

fn thermal_beam(r: &mut Resolver) -> Result<Outcome, CliError> {
    let constants = constants(r);
    let theta = r.f64_req("temperature")?;
    let beam = ThermalBeam::new(theta, &constants)?;
    let mut result = json!({
        "temperature_K": beam.temperature,
        "power_W": beam.power,
        "power_quadrature_W": thermal::thermal_power_quadrature(theta, &constants)?,
        "S2_renyi2_W_per_K": beam.renyi2_flow,
        "S2_renyi2_quadrature_W_per_K": thermal::thermal_entropy_flow_renyi2_quadrature(theta, &constants)?,
        "S_von_neumann_W_per_K": beam.vn_flow,
        "von_neumann_over_renyi2": beam.vn_flow / beam.renyi2_flow,
        "power_constant_quadrature": thermal::power_constant_quadrature()?,
        "renyi2_constant_quadrature": thermal::renyi2_constant_quadrature()?,
        "von_neumann_constant_quadrature": thermal::von_neumann_constant_quadrature()?,
    });
    if r.has("omega") {
        let omega = r.f64_req("omega")?;
        extend(&mut result, json!({ "mean_occupation": thermal::mean_occupation(omega, theta, &constants)? }));
    }
    Ok(Outcome::plain(result))
}

fn compare(r: &mut Resolver) -> Result<Outcome, CliError> {
    let constants = constants(r);
    let power = r.f64_req("power")?;
    let q = r.f64_req("q-factor")?;
    let cmp = thermal::compare_laser_thermal(power, q, &constants)?;
    let mut result = serde_json::to_value(cmp).expect("comparison serialises");
    extend(&mut result, json!({ "power_W": power, "q_factor": q }));
    Ok(Outcome::plain(result))
}

fn crosscheck(r: &mut Resolver) -> Result<Outcome, CliError> {
    let src = source(r)?;
    let coherence = reduced_coherence(&src)?;
    let grid = r.count_or("grid", DEFAULT_GRID_POINTS)?;
    SpectralConfig::finite_difference(grid).validate()?;
    let (config, interval, window) = path_config(r)?;
    let spectral = richardson_reduced_eigenvalue(coherence, grid)?;
    let (_, fit) = estimate_decay_rate(&config, coherence, interval, window)?;
    let diff = (fit.lambda_hat - spectral).abs();
    let sigmas = diff / fit.stderr;
    let pass = sigmas < CROSSCHECK_SIGMA;
    let result = json!({
        "coherence": coherence,
        "spectral_lambda_tilde": spectral,
        "mc_lambda_hat": fit.lambda_hat,
        "mc_stderr": fit.stderr,
        "abs_difference": diff,
        "sigma_distance": sigmas,
        "threshold_sigma": CROSSCHECK_SIGMA,
        "leading_correction_ratio": (1.0 - spectral) * 8.0 * coherence.sqrt(),
        "status": if pass { "PASS" } else { "FAIL" },
    });
    Ok(Outcome { result, table: None, failed: !pass })
}
