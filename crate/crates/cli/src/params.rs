use std::collections::BTreeMap;
use std::path::Path;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Second-order finite differences on the periodic grid.
    Fd,
    /// Cosine basis.
    Fourier,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Every parameter any command reads. Flag names double as keys of the JSON
/// config file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    /// Mean photon flow Ṅ, 1/s.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub photon_flow: Option<f64>,
    /// Lorentzian FWHM linewidth ℓ, 1/s.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linewidth: Option<f64>,
    /// Cavity damping rate κ, 1/s (with --mu instead of --photon-flow/--linewidth).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Intracavity photon number μ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Carrier angular frequency ω₀, rad/s.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centre_frequency: Option<f64>,
    /// Carrier vacuum wavelength, nm, used when --centre-frequency is absent [default: 1064].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength_nm: Option<f64>,
    /// k_B = ħ = 1.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub natural_units: bool,

    /// Coherence 𝔠 = 4Ṅ/ℓ, instead of a beam.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence: Option<f64>,
    /// Grid points per period [default: 2048].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,

    /// Monte Carlo sample count.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Reduced time step.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Reduced horizon [default: end of the fit window].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Reduced time between stored samples of u.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_start: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_end: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub antithetic: bool,

    /// Coherent amplitude r of one segment.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Phase variance of one walk over one segment, rad².
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_variance: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segments: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<f64>,

    /// Thermal source temperature, K.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    /// Mode angular frequency for the occupation number, rad/s.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Beam power, W.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_factor: Option<f64>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Worker threads; 0 or unset means all cores.
    #[arg(long, env = "LASER_ENTROPY_THREADS")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Params {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))
    }

    pub fn to_map(&self) -> Map<String, Value> {
        match serde_json::to_value(self).expect("params serialise") {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }

    /// Numeric keys a sweep may vary.
    pub const SWEEPABLE: &'static [&'static str] = &[
        "photon-flow",
        "linewidth",
        "kappa",
        "mu",
        "centre-frequency",
        "wavelength-nm",
        "coherence",
        "grid",
        "paths",
        "seed",
        "step",
        "horizon",
        "sample-interval",
        "window-start",
        "window-end",
        "amplitude",
        "phase-variance",
        "segments",
        "n-max",
        "n-grid",
        "temperature",
        "omega",
        "power",
        "q-factor",
    ];
}

/// File values overlaid by flags.
pub fn merge(file: Option<&Params>, flags: &Params) -> Map<String, Value> {
    let mut out = file.map(Params::to_map).unwrap_or_default();
    for (k, v) in flags.to_map() {
        out.insert(k, v);
    }
    out
}

/// Typed access to the merged parameters. Every value read, default or not,
/// is recorded so the artifact carries the configuration actually used.
pub struct Resolver {
    values: Map<String, Value>,
    used: BTreeMap<String, Value>,
}

impl Resolver {
    pub fn new(values: Map<String, Value>) -> Self {
        Self { values, used: BTreeMap::new() }
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.get(key).is_some_and(|v| !v.is_null())
    }

    fn record(&mut self, key: &str, v: Value) {
        self.used.insert(key.to_string(), v);
    }

    pub fn f64_opt(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => {
                let x = v.as_f64().ok_or_else(|| CliError::config(key, format!("expected a number, got {v}")))?;
                self.record(key, v.clone());
                Ok(Some(x))
            }
        }
    }

    pub fn f64_req(&mut self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?.ok_or_else(|| CliError::config(key, "required"))
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.f64_opt(key)? {
            Some(x) => Ok(x),
            None => {
                self.record(key, Value::from(default));
                Ok(default)
            }
        }
    }

    pub fn count_or(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        let x = self.f64_or(key, default as f64)?;
        if !(x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53)) {
            return Err(CliError::config(key, format!("expected a non-negative integer, got {x}")));
        }
        let n = x as usize;
        self.record(key, Value::from(n));
        Ok(n)
    }

    pub fn flag(&mut self, key: &str) -> bool {
        let on = self.values.get(key).and_then(Value::as_bool).unwrap_or(false);
        self.record(key, Value::from(on));
        on
    }

    pub fn seed(&mut self) -> Result<u64, CliError> {
        let seed = match self.values.get("seed") {
            None | Some(Value::Null) => 0,
            Some(v) => match (v.as_u64(), v.as_f64()) {
                (Some(n), _) => n,
                (None, Some(x)) if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) => x as u64,
                _ => return Err(CliError::config("seed", format!("expected a non-negative integer, got {v}"))),
            },
        };
        self.record("seed", Value::from(seed));
        Ok(seed)
    }

    pub fn method(&mut self) -> Result<Method, CliError> {
        let m = match self.values.get("method") {
            None | Some(Value::Null) => Method::Fd,
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|_| CliError::config("method", format!("expected \"fd\" or \"fourier\", got {v}")))?,
        };
        self.record("method", serde_json::to_value(m).expect("method"));
        Ok(m)
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.values.insert(key.to_string(), v);
    }

    pub fn used(&self) -> &BTreeMap<String, Value> {
        &self.used
    }
}
