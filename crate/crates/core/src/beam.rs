//! Beam parameters, units, the reduced problem and the closed-form entropy flow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coherence below which the asymptotic flow `k_B √(Ṅℓ)` is flagged as unreliable.
/// The leading finite-coherence correction `1/(8√𝔠)` exceeds ~1% here.
pub const LOW_COHERENCE_THRESHOLD: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Si,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Boltzmann constant, J/K.
    pub boltzmann: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    pub mode: UnitSystem,
}

impl PhysicalConstants {
    /// CODATA 2018 (both values exact in the revised SI).
    pub const SI: PhysicalConstants = PhysicalConstants {
        boltzmann: 1.380_649e-23,
        hbar: 1.054_571_817e-34,
        mode: UnitSystem::Si,
    };

    /// `k_B = ħ = 1`.
    pub const NATURAL: PhysicalConstants = PhysicalConstants {
        boltzmann: 1.0,
        hbar: 1.0,
        mode: UnitSystem::Natural,
    };

    pub fn from_mode(mode: UnitSystem) -> Self {
        match mode {
            UnitSystem::Si => Self::SI,
            UnitSystem::Natural => Self::NATURAL,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

/// An entropy rate. Stored in units of `k_B` per second; [`Self::watts_per_kelvin`]
/// multiplies by the Boltzmann constant of the constants it was built with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyFlow {
    per_kb_per_s: f64,
    boltzmann: f64,
}

impl EntropyFlow {
    pub fn new(per_kb_per_s: f64, constants: &PhysicalConstants) -> Self {
        Self { per_kb_per_s, boltzmann: constants.boltzmann }
    }

    pub fn per_kb_per_s(&self) -> f64 {
        self.per_kb_per_s
    }

    pub fn watts_per_kelvin(&self) -> f64 {
        self.per_kb_per_s * self.boltzmann
    }
}

/// `4Ṅ/ℓ`, or an explicit marker when the linewidth vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Coherence {
    Finite(f64),
    Infinite,
}

impl Coherence {
    pub fn finite(self) -> Result<f64> {
        match self {
            Coherence::Finite(c) => Ok(c),
            Coherence::Infinite => Err(Error::InfiniteCoherence),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Advisory {
    /// `𝔠 < 100`: the asymptotic flow is off by more than about a percent.
    LowCoherence,
    /// `ℓ > ω₀/10`: the beam is not quasi-monochromatic.
    LinewidthComparableToCarrier,
}

/// The three rates that define an ideal laser beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    photon_flow: f64,
    linewidth: f64,
    centre_frequency: f64,
}

impl BeamParams {
    /// Mean photon flow Ṅ, photons per second.
    pub fn photon_flow(&self) -> f64 {
        self.photon_flow
    }

    /// Lorentzian FWHM linewidth ℓ (= phase diffusion rate), 1/s.
    pub fn linewidth(&self) -> f64 {
        self.linewidth
    }

    /// Carrier angular frequency ω₀, rad/s.
    pub fn centre_frequency(&self) -> f64 {
        self.centre_frequency
    }

    pub fn coherence(&self) -> Coherence {
        if self.photon_flow == 0.0 {
            Coherence::Finite(0.0)
        } else if self.linewidth == 0.0 {
            Coherence::Infinite
        } else {
            Coherence::Finite(4.0 * self.photon_flow / self.linewidth)
        }
    }

    pub fn q_factor(&self) -> Coherence {
        if self.linewidth == 0.0 {
            Coherence::Infinite
        } else {
            Coherence::Finite(self.centre_frequency / self.linewidth)
        }
    }

    /// Beam power `ħω₀Ṅ`.
    pub fn power(&self, constants: &PhysicalConstants) -> f64 {
        constants.hbar * self.centre_frequency * self.photon_flow
    }

    pub fn advisories(&self) -> Vec<Advisory> {
        let mut out = Vec::new();
        if let Coherence::Finite(c) = self.coherence() {
            if c < LOW_COHERENCE_THRESHOLD {
                out.push(Advisory::LowCoherence);
            }
        }
        if self.linewidth > self.centre_frequency / 10.0 {
            out.push(Advisory::LinewidthComparableToCarrier);
        }
        out
    }

    /// The same beam with a different carrier frequency.
    pub fn with_centre_frequency(&self, centre_frequency: f64) -> Result<Self> {
        beam_from_rates(self.photon_flow, self.linewidth, centre_frequency)
    }
}

fn check_rate(param: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::domain(param, format!("must be finite, got {value}")));
    }
    if value < 0.0 {
        return Err(Error::domain(param, format!("must be non-negative, got {value}")));
    }
    Ok(())
}

pub fn beam_from_rates(photon_flow: f64, linewidth: f64, centre_frequency: f64) -> Result<BeamParams> {
    check_rate("photon_flow", photon_flow)?;
    check_rate("linewidth", linewidth)?;
    check_rate("centre_frequency", centre_frequency)?;
    if centre_frequency == 0.0 {
        return Err(Error::domain("centre_frequency", "must be strictly positive"));
    }
    Ok(BeamParams { photon_flow, linewidth, centre_frequency })
}

/// Beam of a quantum-limited laser with intracavity photon number `mu` and
/// cavity damping rate `kappa`: `ℓ = κ/2μ`, `Ṅ = κμ`.
pub fn beam_from_cavity(kappa: f64, mu: f64, centre_frequency: f64) -> Result<BeamParams> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::domain("kappa", format!("must be finite and positive, got {kappa}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::domain("mu", format!("must be finite and positive, got {mu}")));
    }
    beam_from_rates(kappa * mu, kappa / (2.0 * mu), centre_frequency)
}

/// `k_B √(Ṅℓ)`.
pub fn asymptotic_entropy_flow(beam: &BeamParams, constants: &PhysicalConstants) -> EntropyFlow {
    EntropyFlow::new((beam.photon_flow * beam.linewidth).sqrt(), constants)
}

/// `k_B √(P/ħ) √(ℓ/ω₀)` with `P = ħω₀Ṅ`; algebraically identical to
/// [`asymptotic_entropy_flow`].
pub fn asymptotic_entropy_flow_power_form(beam: &BeamParams, constants: &PhysicalConstants) -> EntropyFlow {
    let power = beam.power(constants);
    let rate = (power / constants.hbar).sqrt() * (beam.linewidth / beam.centre_frequency).sqrt();
    EntropyFlow::new(rate, constants)
}

/// Dimensionless form of the Feynman–Kac problem.
///
/// With `x = y·√(2/ℓ)·ε` the operator `-½∂ₓ² + 4Ṅ sin²(√(ℓ/2) x)` becomes
/// `2√(Ṅℓ) · [-½∂ᵧ² + sin²(εy)/(2ε²)]`, so the only parameter left is
/// `ε = (4𝔠)^{-1/4}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedProblem {
    pub coherence: f64,
    pub epsilon: f64,
    /// `√(Ṅℓ)`, 1/s. Equal to 1 for problems built from a bare coherence.
    pub rate_scale: f64,
}

impl ReducedProblem {
    /// Reduced problem with time measured in units of `1/√(Ṅℓ)`.
    pub fn from_coherence(coherence: f64) -> Result<Self> {
        if !(coherence.is_finite() && coherence > 0.0) {
            return Err(Error::Degenerate(format!(
                "reduced problem needs finite positive coherence, got {coherence}"
            )));
        }
        Ok(Self { coherence, epsilon: epsilon_for(coherence), rate_scale: 1.0 })
    }

    /// `λ₀` from the lowest eigenvalue of the bracketed reduced operator.
    pub fn decay_rate_from_bracket(&self, bracket_eigenvalue: f64) -> f64 {
        2.0 * self.rate_scale * bracket_eigenvalue
    }

    /// `λ₀` from the reduced rate `λ̃₀ = λ₀/√(Ṅℓ)`.
    pub fn decay_rate_from_reduced(&self, reduced_rate: f64) -> f64 {
        self.rate_scale * reduced_rate
    }
}

pub(crate) fn epsilon_for(coherence: f64) -> f64 {
    (4.0 * coherence).powf(-0.25)
}

pub fn reduce(beam: &BeamParams) -> Result<ReducedProblem> {
    if beam.photon_flow == 0.0 || beam.linewidth == 0.0 {
        return Err(Error::Degenerate(
            "photon flow and linewidth must both be positive to form the reduced problem".into(),
        ));
    }
    let coherence = beam.coherence().finite()?;
    Ok(ReducedProblem {
        coherence,
        epsilon: 0.5 * (beam.linewidth / beam.photon_flow).powf(0.25),
        rate_scale: (beam.photon_flow * beam.linewidth).sqrt(),
    })
}

/// Counting argument for the entropy flow: over `δt = 1/√(Ṅℓ)` the coherent
/// amplitude is displaced by about one unit, so each phase path splits into two
/// distinguishable ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicBreakdown {
    /// δt, s.
    pub segment_duration: f64,
    /// `r = (Ṅ/ℓ)^{1/4}`.
    pub segment_amplitude: f64,
    /// `√(ℓδt)`, rad.
    pub phase_step: f64,
    /// `r√(ℓδt)`; always 1.
    pub amplitude_displacement: f64,
    /// `k_B/δt`.
    pub heuristic_rate: EntropyFlow,
    /// `k_B ln2/δt`, one bit per branching.
    pub heuristic_rate_log2: EntropyFlow,
}

pub fn heuristic_branching(beam: &BeamParams, constants: &PhysicalConstants) -> Result<HeuristicBreakdown> {
    if beam.photon_flow == 0.0 || beam.linewidth == 0.0 {
        return Err(Error::Degenerate(
            "branching heuristic needs positive photon flow and linewidth".into(),
        ));
    }
    let rate = (beam.photon_flow * beam.linewidth).sqrt();
    let segment_duration = 1.0 / rate;
    let segment_amplitude = (beam.photon_flow / beam.linewidth).powf(0.25);
    let phase_step = (beam.linewidth * segment_duration).sqrt();
    Ok(HeuristicBreakdown {
        segment_duration,
        segment_amplitude,
        phase_step,
        amplitude_displacement: segment_amplitude * phase_step,
        heuristic_rate: EntropyFlow::new(rate, constants),
        heuristic_rate_log2: EntropyFlow::new(std::f64::consts::LN_2 * rate, constants),
    })
}
