//! Ground eigenvalue of the reduced Feynman–Kac operator
//! `H = -½∂ᵧ² + sin²(εy)/(2ε²)` on one period `[0, π/ε)`.
//!
//! The potential is periodic, so the bottom of the whole-line spectrum is the
//! lowest periodic eigenvalue on one cell. The decay rate of the purity is
//! `λ₀ = 2√(Ṅℓ)·E₀(H)`; everything here reports the reduced rate
//! `λ̃₀ = λ₀/√(Ṅℓ) = 2E₀`, which tends to 1 as the coherence grows.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::beam::{epsilon_for, BeamParams, EntropyFlow, PhysicalConstants};
use crate::error::{Error, Result};
use crate::linalg::CyclicTridiagonal;

pub const MIN_GRID_POINTS: usize = 16;
pub const DEFAULT_GRID_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discretization {
    /// Second-order central differences on a uniform periodic grid.
    FiniteDifference,
    /// Even, period-`π/ε` cosine modes `cos(2nεy)`; exponentially convergent.
    FourierCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Grid points for finite differences, basis functions for the cosine basis.
    pub grid_points: usize,
    pub discretization: Discretization,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { grid_points: DEFAULT_GRID_POINTS, discretization: Discretization::FiniteDifference }
    }
}

impl SpectralConfig {
    pub fn finite_difference(grid_points: usize) -> Self {
        Self { grid_points, discretization: Discretization::FiniteDifference }
    }

    pub fn fourier(grid_points: usize) -> Self {
        Self { grid_points, discretization: Discretization::FourierCosine }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points < MIN_GRID_POINTS {
            return Err(Error::config(
                "grid_points",
                format!("need at least {MIN_GRID_POINTS}, got {}", self.grid_points),
            ));
        }
        Ok(())
    }
}

/// Reduced potential `sin²(εy)/(2ε²)`.
pub fn reduced_potential(y: f64, epsilon: f64) -> f64 {
    let s = (epsilon * y).sin();
    s * s / (2.0 * epsilon * epsilon)
}

/// Discretised reduced operator.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    pub matrix: CyclicTridiagonal,
    pub config: SpectralConfig,
    pub coherence: f64,
    pub epsilon: f64,
    /// Period `π/ε` of the potential.
    pub period: f64,
}

impl SpectralOperator {
    /// Grid spacing for finite differences.
    pub fn spacing(&self) -> f64 {
        self.period / self.config.grid_points as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.config.grid_points).map(|j| j as f64 * h).collect()
    }
}

pub fn build_operator(coherence: f64, config: &SpectralConfig) -> Result<SpectralOperator> {
    config.validate()?;
    if !(coherence.is_finite() && coherence > 0.0) {
        return Err(Error::domain("coherence", format!("must be finite and positive, got {coherence}")));
    }
    let epsilon = epsilon_for(coherence);
    let period = PI / epsilon;
    let m = config.grid_points;
    let matrix = match config.discretization {
        Discretization::FiniteDifference => {
            let h = period / m as f64;
            let kinetic = 0.5 / (h * h);
            let diag = (0..m).map(|j| 2.0 * kinetic + reduced_potential(j as f64 * h, epsilon)).collect();
            CyclicTridiagonal::new(diag, vec![-kinetic; m - 1], -kinetic)?
        }
        Discretization::FourierCosine => {
            // sin²z/(2ε²) = (1 - cos 2z)/(4ε²); cos 2z couples neighbouring modes
            let base = 0.25 / (epsilon * epsilon);
            let diag = (0..m).map(|n| 2.0 * (n as f64 * epsilon).powi(2) + base).collect();
            let off = (0..m - 1)
                .map(|n| if n == 0 { -base / 2f64.sqrt() } else { -base / 2.0 })
                .collect();
            CyclicTridiagonal::new(diag, off, 0.0)?
        }
    };
    Ok(SpectralOperator { matrix, config: *config, coherence, epsilon, period })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundSolution {
    /// `λ̃₀ = λ₀/√(Ṅℓ)`.
    pub reduced_eigenvalue: f64,
    /// Ground state sampled on `grid_points` equispaced points of one period,
    /// unit discrete 2-norm, positive.
    pub eigenfunction: Vec<f64>,
    pub grid_points: usize,
    /// `‖Av − E₀v‖` of the matrix eigenpair.
    pub residual_norm: f64,
    /// `u₀(0)·∫u₀` over one period for the continuum-normalised ground state:
    /// the prefactor of `e^{-λ̃₀τ}` in `u(0, τ)` at long reduced times.
    pub long_time_prefactor: f64,
}

/// Lowest eigenpair of a discretised operator.
pub fn ground_eigenvalue(op: &SpectralOperator) -> Result<GroundSolution> {
    let pair = op.matrix.lowest_eigenpair()?;
    let m = op.config.grid_points;
    let (eigenfunction, prefactor) = match op.config.discretization {
        Discretization::FiniteDifference => {
            let v = pair.vector;
            let prefactor = v[0] * v.iter().sum::<f64>();
            (v, prefactor)
        }
        Discretization::FourierCosine => {
            let c = &pair.vector;
            let l = op.period;
            let mode = |n: usize, y: f64| {
                if n == 0 {
                    1.0 / l.sqrt()
                } else {
                    (2.0 / l).sqrt() * (2.0 * n as f64 * op.epsilon * y).cos()
                }
            };
            let eval = |y: f64| c.iter().enumerate().map(|(n, cn)| cn * mode(n, y)).sum::<f64>();
            let sign = if eval(0.0) < 0.0 { -1.0 } else { 1.0 };
            let h = l / m as f64;
            let mut samples: Vec<f64> = (0..m).map(|j| sign * eval(j as f64 * h)).collect();
            let norm = samples.iter().map(|x| x * x).sum::<f64>().sqrt();
            samples.iter_mut().for_each(|x| *x /= norm);
            let prefactor = eval(0.0) * c[0] * l.sqrt();
            (samples, prefactor)
        }
    };
    Ok(GroundSolution {
        reduced_eigenvalue: 2.0 * pair.value,
        eigenfunction,
        grid_points: m,
        residual_norm: pair.residual,
        long_time_prefactor: prefactor,
    })
}

pub fn reduced_ground_eigenvalue(coherence: f64, config: &SpectralConfig) -> Result<GroundSolution> {
    ground_eigenvalue(&build_operator(coherence, config)?)
}

/// Richardson extrapolation of the second-order finite-difference eigenvalue
/// from grids `M` and `2M`: `(4λ(2M) − λ(M))/3`.
pub fn richardson_reduced_eigenvalue(coherence: f64, grid_points: usize) -> Result<f64> {
    let coarse = reduced_ground_eigenvalue(coherence, &SpectralConfig::finite_difference(grid_points))?;
    let fine = reduced_ground_eigenvalue(coherence, &SpectralConfig::finite_difference(2 * grid_points))?;
    Ok((4.0 * fine.reduced_eigenvalue - coarse.reduced_eigenvalue) / 3.0)
}

/// `k_B √(Ṅℓ) λ̃₀(𝔠)`. Exactly zero when either rate vanishes: the potential
/// or the diffusion switches off and the beam state is pure.
pub fn entropy_flow_spectral(
    beam: &BeamParams,
    config: &SpectralConfig,
    constants: &PhysicalConstants,
) -> Result<EntropyFlow> {
    if beam.photon_flow() == 0.0 || beam.linewidth() == 0.0 {
        return Ok(EntropyFlow::new(0.0, constants));
    }
    let reduced = crate::beam::reduce(beam)?;
    let ground = reduced_ground_eigenvalue(reduced.coherence, config)?;
    Ok(EntropyFlow::new(reduced.decay_rate_from_reduced(ground.reduced_eigenvalue), constants))
}

/// One row of a grid-convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub coherence: f64,
    pub grid_points: usize,
    pub lambda_tilde: f64,
    pub residual: f64,
}

pub fn convergence_sweep(coherence: f64, grids: &[usize], discretization: Discretization) -> Result<Vec<ConvergenceRow>> {
    grids
        .iter()
        .map(|&m| {
            let sol = reduced_ground_eigenvalue(coherence, &SpectralConfig { grid_points: m, discretization })?;
            Ok(ConvergenceRow {
                coherence,
                grid_points: m,
                lambda_tilde: sol.reduced_eigenvalue,
                residual: sol.residual_norm,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::beam_from_rates;

    #[test]
    fn potential_entries() {
        let op = build_operator(100.0, &SpectralConfig::finite_difference(64)).unwrap();
        let h = op.spacing();
        let kinetic = 1.0 / (h * h);
        // y = 0: potential vanishes
        assert!((op.matrix.diag()[0] - kinetic).abs() < 1e-12 * kinetic);
        // y = π/(2ε): potential is 1/(2ε²)
        let eps = op.epsilon;
        assert!((op.matrix.diag()[32] - kinetic - 0.5 / (eps * eps)).abs() < 1e-9);
    }

    #[test]
    fn kinetic_rows_sum_to_zero() {
        let op = build_operator(25.0, &SpectralConfig::finite_difference(32)).unwrap();
        let grid = op.grid();
        let m = &op.matrix;
        for (i, y) in grid.iter().enumerate() {
            let kin = m.diag()[i] - reduced_potential(*y, op.epsilon);
            let row = kin + 2.0 * m.off()[0];
            assert!(row.abs() < 1e-12 * kin, "row {i}: {row}");
        }
        assert_eq!(m.corner(), m.off()[0]);
    }

    #[test]
    fn too_small_grid_is_rejected() {
        assert!(matches!(
            build_operator(10.0, &SpectralConfig::finite_difference(8)),
            Err(Error::Config { param: "grid_points", .. })
        ));
        assert!(build_operator(0.0, &SpectralConfig::default()).is_err());
    }

    #[test]
    fn structured_solver_matches_dense() {
        let op = build_operator(25.0, &SpectralConfig::finite_difference(128)).unwrap();
        let dense = op.matrix.to_dense().symmetric_eigen();
        let min = dense.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let sol = ground_eigenvalue(&op).unwrap();
        assert!((sol.reduced_eigenvalue - 2.0 * min).abs() < 1e-11);
    }

    #[test]
    fn eigenfunction_positive_even_normalized() {
        let sol = reduced_ground_eigenvalue(100.0, &SpectralConfig::finite_difference(512)).unwrap();
        let v = &sol.eigenfunction;
        assert!(v.iter().all(|&x| x > 0.0));
        let norm: f64 = v.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        for j in 1..v.len() {
            assert!((v[j] - v[v.len() - j]).abs() < 1e-10);
        }
        assert!(sol.long_time_prefactor > 0.0);
    }

    #[test]
    fn fourier_matches_finite_difference() {
        for c in [25.0, 100.0, 1e3] {
            let fd = richardson_reduced_eigenvalue(c, 1024).unwrap();
            let fourier = reduced_ground_eigenvalue(c, &SpectralConfig::fourier(64)).unwrap();
            assert!((fd - fourier.reduced_eigenvalue).abs() < 1e-8, "c={c}: {fd} vs {}", fourier.reduced_eigenvalue);
            let fd_sol = reduced_ground_eigenvalue(c, &SpectralConfig::finite_difference(1024)).unwrap();
            assert!((fd_sol.long_time_prefactor - fourier.long_time_prefactor).abs() < 1e-4);
        }
    }

    #[test]
    fn second_order_convergence() {
        let rows = convergence_sweep(100.0, &[128, 256, 512], Discretization::FiniteDifference).unwrap();
        let d1 = rows[0].lambda_tilde - rows[1].lambda_tilde;
        let d2 = rows[1].lambda_tilde - rows[2].lambda_tilde;
        let ratio = d1 / d2;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn harmonic_and_mean_potential_bounds() {
        for c in [0.5, 2.0, 25.0, 100.0, 1e4] {
            let lam = reduced_ground_eigenvalue(c, &SpectralConfig::fourier(128)).unwrap().reduced_eigenvalue;
            assert!(lam > 0.0 && lam < 1.0, "c={c}: {lam}");
            assert!(lam <= c.sqrt(), "c={c}: {lam}");
        }
    }

    #[test]
    fn spectral_flow_is_carrier_independent_and_below_asymptote() {
        let k = PhysicalConstants::NATURAL;
        let beam = beam_from_rates(50.0, 2.0, 1e6).unwrap();
        let cfg = SpectralConfig::fourier(96);
        let a = entropy_flow_spectral(&beam, &cfg, &k).unwrap();
        let b = entropy_flow_spectral(&beam.with_centre_frequency(3e9).unwrap(), &cfg, &k).unwrap();
        assert_eq!(a, b);
        assert!(a.per_kb_per_s() < crate::beam::asymptotic_entropy_flow(&beam, &k).per_kb_per_s());
    }

    #[test]
    fn spectral_flow_zero_limits() {
        let k = PhysicalConstants::NATURAL;
        for (n, l) in [(0.0, 1.0), (1.0, 0.0)] {
            let beam = beam_from_rates(n, l, 1.0).unwrap();
            assert_eq!(entropy_flow_spectral(&beam, &SpectralConfig::default(), &k).unwrap().per_kb_per_s(), 0.0);
        }
    }
}
