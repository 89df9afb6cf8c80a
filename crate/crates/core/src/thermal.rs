//! Unidirectional, polarised, one-dimensional thermal beam and its comparison
//! with a laser beam of the same power.
//!
//! With `x = ħω/k_BΘ` all three flows reduce to universal integrals:
//!
//! ```text
//! P    = (k_BΘ)²/ħ · (1/2π)∫ x n̄(x) dx                       = (π/12)(k_BΘ)²/ħ
//! Ṡ₂   = k_B (k_BΘ/ħ) · (1/2π)∫ ln(2n̄ + 1) dx                = (π/8) k_B² Θ/ħ
//! Ṡ₁   = k_B (k_BΘ/ħ) · (1/2π)∫ (n̄+1)ln(n̄+1) − n̄ ln n̄ dx    = (π/6) k_B² Θ/ħ
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::beam::PhysicalConstants;
use crate::error::{Error, Result};
use crate::quad::integrate;

/// `(1/2π)∫ x n̄ dx`.
pub const POWER_CONSTANT: f64 = PI / 12.0;
/// `(1/2π)∫ ln(2n̄+1) dx`.
pub const RENYI2_CONSTANT: f64 = PI / 8.0;
/// `(1/2π)∫ [(n̄+1)ln(n̄+1) − n̄ ln n̄] dx`.
pub const VON_NEUMANN_CONSTANT: f64 = PI / 6.0;

/// Upper cut of the dimensionless integrals; the tails beyond are added analytically.
const CUTOFF: f64 = 50.0;
const QUAD_TOL: f64 = 1e-12;

fn positive(param: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(param, format!("must be finite and positive, got {v}")))
    }
}

/// Bose–Einstein occupation at `x = ħω/k_BΘ`.
pub fn occupation(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// `n̄ = 1/(e^{ħω/k_BΘ} − 1)`.
pub fn mean_occupation(omega: f64, theta: f64, constants: &PhysicalConstants) -> Result<f64> {
    positive("omega", omega)?;
    positive("theta", theta)?;
    Ok(occupation(constants.hbar * omega / (constants.boltzmann * theta)))
}

fn power_integrand(x: f64) -> f64 {
    x / x.exp_m1()
}

/// `ln(2n̄+1) = ln coth(x/2)`.
fn renyi2_integrand(x: f64) -> f64 {
    let q = (-x).exp();
    q.ln_1p() - (-q).ln_1p()
}

fn von_neumann_integrand(x: f64) -> f64 {
    let n = occupation(x);
    let tail = if n > 0.0 { n * n.ln() } else { 0.0 };
    (n + 1.0) * n.ln_1p() - tail
}

/// `(1/2π)∫₀^∞ x n̄ dx` by adaptive quadrature on `[0, 50]` plus `(51)e^{-50}/2π`.
pub fn power_constant_quadrature() -> Result<f64> {
    let body = integrate(power_integrand, 0.0, CUTOFF, QUAD_TOL)?;
    let tail = (CUTOFF + 1.0) * (-CUTOFF).exp();
    Ok((body + tail) / (2.0 * PI))
}

/// `(1/2π)∫₀^∞ ln(2n̄+1) dx`; tail `≈ 2e^{-50}`.
pub fn renyi2_constant_quadrature() -> Result<f64> {
    let body = integrate(renyi2_integrand, 0.0, CUTOFF, QUAD_TOL)?;
    let tail = 2.0 * (-CUTOFF).exp();
    Ok((body + tail) / (2.0 * PI))
}

/// `(1/2π)∫₀^∞ (n̄+1)ln(n̄+1) − n̄ ln n̄ dx`; tail `≈ (51 + 1)e^{-50}`.
pub fn von_neumann_constant_quadrature() -> Result<f64> {
    let body = integrate(von_neumann_integrand, 0.0, CUTOFF, QUAD_TOL)?;
    let tail = (CUTOFF + 2.0) * (-CUTOFF).exp();
    Ok((body + tail) / (2.0 * PI))
}

/// `(π/12)(k_BΘ)²/ħ`.
pub fn thermal_power(theta: f64, constants: &PhysicalConstants) -> Result<f64> {
    positive("theta", theta)?;
    Ok(POWER_CONSTANT * (constants.boltzmann * theta).powi(2) / constants.hbar)
}

/// Power from the spectral integral rather than the closed form.
pub fn thermal_power_quadrature(theta: f64, constants: &PhysicalConstants) -> Result<f64> {
    positive("theta", theta)?;
    Ok(power_constant_quadrature()? * (constants.boltzmann * theta).powi(2) / constants.hbar)
}

/// `k_B (π/8)(k_BΘ/ħ)`, W/K in SI.
pub fn thermal_entropy_flow_renyi2(theta: f64, constants: &PhysicalConstants) -> Result<f64> {
    positive("theta", theta)?;
    Ok(RENYI2_CONSTANT * constants.boltzmann * constants.boltzmann * theta / constants.hbar)
}

pub fn thermal_entropy_flow_renyi2_quadrature(theta: f64, constants: &PhysicalConstants) -> Result<f64> {
    positive("theta", theta)?;
    Ok(renyi2_constant_quadrature()? * constants.boltzmann * constants.boltzmann * theta / constants.hbar)
}

/// Von Neumann flow, `4/3` of the Rényi-2 flow.
pub fn thermal_entropy_flow_von_neumann(theta: f64, constants: &PhysicalConstants) -> Result<f64> {
    Ok(thermal_entropy_flow_renyi2(theta, constants)? * 4.0 / 3.0)
}

/// Temperature whose thermal beam carries `power`.
pub fn equivalent_temperature(power: f64, constants: &PhysicalConstants) -> Result<f64> {
    positive("power", power)?;
    Ok((power * constants.hbar / POWER_CONSTANT).sqrt() / constants.boltzmann)
}

/// `Ṡ₂ = k_B √(P/ħ) √(3π/16)` at the power `P` of the beam.
pub fn thermal_renyi2_from_power(power: f64, constants: &PhysicalConstants) -> Result<f64> {
    positive("power", power)?;
    Ok(constants.boltzmann * (power / constants.hbar).sqrt() * (3.0 * PI / 16.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalBeam {
    pub temperature: f64,
    pub power: f64,
    pub renyi2_flow: f64,
    pub vn_flow: f64,
}

impl ThermalBeam {
    pub fn new(temperature: f64, constants: &PhysicalConstants) -> Result<Self> {
        Ok(Self {
            temperature,
            power: thermal_power(temperature, constants)?,
            renyi2_flow: thermal_entropy_flow_renyi2(temperature, constants)?,
            vn_flow: thermal_entropy_flow_von_neumann(temperature, constants)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserThermalComparison {
    #[serde(rename = "laser_S2_W_per_K")]
    pub laser_s2: f64,
    #[serde(rename = "thermal_S2_W_per_K")]
    pub thermal_s2: f64,
    /// Laser over thermal, `√(16/(3πQ))`.
    pub ratio: f64,
    #[serde(rename = "equivalent_temperature_K")]
    pub equivalent_temperature: f64,
}

/// Laser (`ℓ/ω₀ = 1/Q`) and thermal Rényi-2 flows at equal power.
pub fn compare_laser_thermal(power: f64, q_factor: f64, constants: &PhysicalConstants) -> Result<LaserThermalComparison> {
    positive("power", power)?;
    if !(q_factor.is_finite() && q_factor > 1.0) {
        return Err(Error::domain("q_factor", format!("must be finite and greater than 1, got {q_factor}")));
    }
    let laser_s2 = constants.boltzmann * (power / constants.hbar).sqrt() * (1.0 / q_factor).sqrt();
    let thermal_s2 = thermal_renyi2_from_power(power, constants)?;
    Ok(LaserThermalComparison {
        laser_s2,
        thermal_s2,
        ratio: laser_s2 / thermal_s2,
        equivalent_temperature: equivalent_temperature(power, constants)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SI: PhysicalConstants = PhysicalConstants::SI;

    #[test]
    fn occupation_values() {
        let k = PhysicalConstants::NATURAL;
        assert!((mean_occupation(2f64.ln(), 1.0, &k).unwrap() - 1.0).abs() < 1e-15);
        let n = occupation(20.0);
        assert!((n - 2.061_153_6e-9).abs() < 1e-15, "{n}");
        assert_eq!(occupation(1e5), 0.0);
        assert!(mean_occupation(0.0, 1.0, &k).is_err());
        assert!(mean_occupation(1.0, -1.0, &k).is_err());
    }

    #[test]
    fn universal_constants_by_quadrature() {
        let p = power_constant_quadrature().unwrap();
        assert!((p / POWER_CONSTANT - 1.0).abs() < 1e-10, "{p}");
        let s2 = renyi2_constant_quadrature().unwrap();
        assert!((s2 / RENYI2_CONSTANT - 1.0).abs() < 1e-10, "{s2}");
        let s1 = von_neumann_constant_quadrature().unwrap();
        assert!((s1 / VON_NEUMANN_CONSTANT - 1.0).abs() < 1e-10, "{s1}");
    }

    #[test]
    fn universal_constants_by_series() {
        // ∫ x/(eˣ−1) = ζ(2); ∫ ln coth(x/2) = 2Σ_{odd k} 1/k²; ∫ s₁ = 2ζ(2)
        let n = 1_000_000u64;
        let tail = |n: u64| 1.0 / n as f64;
        let zeta2: f64 = (1..=n).rev().map(|k| 1.0 / (k * k) as f64).sum::<f64>() + tail(n);
        let odd: f64 = (0..n).rev().map(|j| 1.0 / ((2 * j + 1) * (2 * j + 1)) as f64).sum::<f64>() + 0.25 * tail(n);
        assert!((zeta2 / (2.0 * PI) - POWER_CONSTANT).abs() < 1e-10);
        assert!((2.0 * odd / (2.0 * PI) - RENYI2_CONSTANT).abs() < 1e-10);
        assert!((2.0 * zeta2 / (2.0 * PI) - VON_NEUMANN_CONSTANT).abs() < 1e-10);
        // π/8 = (3/4)(π/6)
        assert!((RENYI2_CONSTANT - 0.75 * VON_NEUMANN_CONSTANT).abs() < 1e-16);
    }

    #[test]
    fn room_temperature_beam() {
        let p = thermal_power(300.0, &SI).unwrap();
        assert!((p - 4.26e-8).abs() < 0.01e-8, "{p}");
        let s = thermal_entropy_flow_renyi2(300.0, &SI).unwrap();
        assert!((s - 2.13e-10).abs() < 0.01e-10, "{s}");
        for theta in [1.0, 300.0, 1e4] {
            let q = thermal_power_quadrature(theta, &SI).unwrap();
            let c = thermal_power(theta, &SI).unwrap();
            assert!((q / c - 1.0).abs() < 1e-6);
            let q = thermal_entropy_flow_renyi2_quadrature(theta, &SI).unwrap();
            let c = thermal_entropy_flow_renyi2(theta, &SI).unwrap();
            assert!((q / c - 1.0).abs() < 1e-6);
        }
        let ratio = thermal_power(600.0, &SI).unwrap() / p;
        assert!((ratio - 4.0).abs() < 1e-12);
        assert!(thermal_power(0.0, &SI).is_err());
    }

    #[test]
    fn beam_record_identities() {
        let beam = ThermalBeam::new(300.0, &SI).unwrap();
        assert!((beam.vn_flow / beam.renyi2_flow - 4.0 / 3.0).abs() < 1e-12);
        let from_power = thermal_renyi2_from_power(beam.power, &SI).unwrap();
        assert!((from_power / beam.renyi2_flow - 1.0).abs() < 1e-12);
        let t = equivalent_temperature(beam.power, &SI).unwrap();
        assert!((t / 300.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renyi2_integrand_is_minus_log_purity() {
        // single-mode thermal purity 1/(2n̄+1)
        for x in [0.1, 1.0, 5.0] {
            let n = occupation(x);
            let rho = crate::fock::DensityMatrix::thermal(n, 400);
            assert!((renyi2_integrand(x) + rho.purity().ln()).abs() < 1e-8);
        }
    }

    #[test]
    fn laser_thermal_comparison() {
        let c = compare_laser_thermal(0.5, 1e10, &SI).unwrap();
        assert!((c.laser_s2 - 9.5e-12).abs() < 0.1e-12, "{}", c.laser_s2);
        assert!((c.ratio - (16.0 / (3.0 * PI * 1e10)).sqrt()).abs() < 1e-18);
        assert!((c.ratio - 1.30e-5).abs() < 0.01e-5);
        let q4 = compare_laser_thermal(0.5, 4e10, &SI).unwrap();
        assert!((q4.ratio / c.ratio - 0.5).abs() < 1e-12);
        let cross = compare_laser_thermal(1.0, 16.0 / (3.0 * PI), &SI).unwrap();
        assert!((cross.ratio - 1.0).abs() < 1e-12);
        assert!(compare_laser_thermal(0.5, 1.0, &SI).is_err());
        assert!(compare_laser_thermal(-0.5, 10.0, &SI).is_err());
    }
}
