//! Monte Carlo evaluation of the Feynman–Kac path functional.
//!
//! The purity of a beam segment of duration `T` is `u(0, T) = E[exp(-∫V)]` over
//! the difference `X = (W − V)/√2` of two independent phase walks. We work in
//! reduced units: time `τ = T√(Ṅℓ)` and position `y` with `x = y·ε√(2/ℓ)`. In
//! these units the generator is `2H = -∂ᵧ² + sin²(εy)/ε²`, so
//!
//! * the difference walk is `y(τ) = y(0) + √2·B(τ)`, increments of variance `2·dτ`;
//! * the potential is `V(y) = sin²(εy)/ε²`;
//! * `u(0, τ)` decays as `e^{-λ̃₀τ}` with `λ̃₀ = λ₀/√(Ṅℓ)` directly, the same
//!   number [`crate::spectral`] reports.
//!
//! Observations (paths, or antithetic pairs) are grouped in fixed blocks of 32;
//! each block draws sequentially from its own ChaCha stream keyed by
//! `(seed, block)`, and block sums are combined by pairwise summation, so
//! results do not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam::{epsilon_for, BeamParams};
use crate::error::{Error, Result};
use crate::stats::{pairwise_sum, weighted_line_fit, Estimate};

/// Variance of the reduced difference walk per unit reduced time.
pub const DIFFUSION_VARIANCE_RATE: f64 = 2.0;
pub const DEFAULT_STEP: f64 = 1e-2;
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (2.0, 6.0);
const BLOCK: usize = 32;
const MAX_BATCHES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    /// Reduced time step, units of `1/√(Ṅℓ)`.
    pub step: f64,
    /// Reduced horizon.
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// `y(0)`.
    pub initial_point: f64,
    /// Pair each path with its mirror image `2y(0) − y`.
    pub antithetic: bool,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            horizon: DEFAULT_FIT_WINDOW.1,
            n_paths: 100_000,
            seed: 0,
            initial_point: 0.0,
            antithetic: false,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::config("step", format!("must be positive, got {}", self.step)));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.step) {
            return Err(Error::config("horizon", format!("must be at least step, got {}", self.horizon)));
        }
        if self.n_paths == 0 {
            return Err(Error::config("n_paths", "need at least one path"));
        }
        if self.antithetic && self.n_paths % 2 != 0 {
            return Err(Error::config("n_paths", "antithetic sampling needs an even path count"));
        }
        if !self.initial_point.is_finite() {
            return Err(Error::config("initial_point", "must be finite"));
        }
        Ok(())
    }

    /// Number of steps; the grid is `k·step` for `k = 0..=n_steps`.
    pub fn n_steps(&self) -> usize {
        (self.horizon / self.step - 1e-9).ceil() as usize
    }

    fn n_observations(&self) -> usize {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }

    /// Grid-aligned sample times `0, Δ, 2Δ, …` up to the horizon, `Δ` rounded to
    /// a whole number of steps.
    pub fn sample_times(&self, interval: f64) -> Vec<f64> {
        let stride = ((interval / self.step).round() as usize).max(1);
        (0..=self.n_steps()).step_by(stride).map(|k| k as f64 * self.step).collect()
    }
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Discretised trajectories of the reduced difference walk.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    pub step: f64,
    /// One row per path, `n_steps + 1` points each.
    pub paths: Vec<Vec<f64>>,
}

pub fn simulate_difference_paths(config: &PathConfig) -> Result<PathBatch> {
    config.validate()?;
    let n_steps = config.n_steps();
    let sd = (DIFFUSION_VARIANCE_RATE * config.step).sqrt();
    let y0 = config.initial_point;
    let n_obs = config.n_observations();
    let paths: Vec<Vec<f64>> = (0..n_obs.div_ceil(BLOCK))
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = stream_rng(config.seed, b as u64);
            let count = BLOCK.min(n_obs - b * BLOCK);
            let mut out = Vec::with_capacity(2 * count);
            for _ in 0..count {
                let mut plus = Vec::with_capacity(n_steps + 1);
                let mut minus = Vec::with_capacity(n_steps + 1);
                plus.push(y0);
                minus.push(y0);
                let (mut a, mut m) = (y0, y0);
                for _ in 0..n_steps {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    a += sd * z;
                    m -= sd * z;
                    plus.push(a);
                    minus.push(m);
                }
                out.push(plus);
                if config.antithetic {
                    out.push(minus);
                }
            }
            out
        })
        .collect();
    Ok(PathBatch { step: config.step, paths })
}

/// Reduced Feynman–Kac potential `sin²(εy)/ε²`.
pub fn fk_potential(y: f64, epsilon: f64) -> f64 {
    let s = (epsilon * y).sin();
    s * s / (epsilon * epsilon)
}

/// `exp(-∫V(y)dτ)` along one trajectory, trapezoid rule on its grid.
pub fn fk_weight(path: &[f64], step: f64, coherence: f64) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::config("path", format!("need at least 2 points, got {}", path.len())));
    }
    if !(coherence.is_finite() && coherence > 0.0) {
        return Err(Error::config("coherence", format!("must be finite and positive, got {coherence}")));
    }
    let eps = epsilon_for(coherence);
    let v: Vec<f64> = path.iter().map(|&y| fk_potential(y, eps)).collect();
    let interior: f64 = v[1..v.len() - 1].iter().sum();
    let integral = step * (0.5 * (v[0] + v[v.len() - 1]) + interior);
    Ok((-integral).exp())
}

/// `E[∫₀^τ V(y)]` for a walk started at 0: `E[sin²(εy(t))] = (1 − e^{-4ε²t})/2`.
pub fn mean_path_integral(coherence: f64, tau: f64) -> f64 {
    let e2 = epsilon_for(coherence).powi(2);
    (tau - (-(-4.0 * e2 * tau).exp_m1()) / (4.0 * e2)) / (2.0 * e2)
}

/// Jensen lower bound `u(0, τ) ≥ exp(-E[∫V])`.
pub fn jensen_lower_bound(coherence: f64, tau: f64) -> f64 {
    (-mean_path_integral(coherence, tau)).exp()
}

/// Per-batch sums kept for jackknife errors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatchSums {
    pub count: usize,
    pub sums: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UCurve {
    pub times: Vec<f64>,
    pub u_mean: Vec<f64>,
    pub u_stderr: Vec<f64>,
    pub n_paths: usize,
    pub seed: u64,
    /// Number of independent observations (paths, or antithetic pairs).
    pub n_observations: usize,
    #[serde(skip)]
    pub batches: Vec<BatchSums>,
}

impl UCurve {
    /// `t_reduced,u_mean,u_stderr` rows, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_reduced,u_mean,u_stderr\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.times[i], self.u_mean[i], self.u_stderr[i]
            ));
        }
        out
    }
}

struct Ensemble {
    total: Vec<Estimate>,
    batches: Vec<BatchSums>,
    n_obs: usize,
}

/// Run `observe(rng, out)` for `n_obs` independent observations, each writing
/// `width` values, and reduce means and standard errors deterministically.
fn ensemble<F>(n_obs: usize, width: usize, seed: u64, observe: F) -> Ensemble
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let n_blocks = n_obs.div_ceil(BLOCK);
    let blocks: Vec<(usize, Vec<f64>, Vec<f64>)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n_obs);
            let mut sum = vec![0.0; width];
            let mut sum_sq = vec![0.0; width];
            let mut out = vec![0.0; width];
            let mut rng = stream_rng(seed, b as u64);
            for _ in lo..hi {
                observe(&mut rng, &mut out);
                for k in 0..width {
                    sum[k] += out[k];
                    sum_sq[k] += out[k] * out[k];
                }
            }
            (hi - lo, sum, sum_sq)
        })
        .collect();

    let column = |k: usize, range: std::ops::Range<usize>, sq: bool| -> f64 {
        let vals: Vec<f64> = blocks[range].iter().map(|(_, s, q)| if sq { q[k] } else { s[k] }).collect();
        pairwise_sum(&vals)
    };
    let total = (0..width)
        .map(|k| Estimate::from_sums(column(k, 0..n_blocks, false), column(k, 0..n_blocks, true), n_obs))
        .collect();
    let n_batches = n_blocks.min(MAX_BATCHES);
    let batches = if n_batches >= 2 {
        (0..n_batches)
            .map(|b| {
                let range = (b * n_blocks / n_batches)..((b + 1) * n_blocks / n_batches);
                BatchSums {
                    count: blocks[range.clone()].iter().map(|(c, _, _)| c).sum(),
                    sums: (0..width).map(|k| column(k, range.clone(), false)).collect(),
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Ensemble { total, batches, n_obs }
}

fn sample_indices(config: &PathConfig, sample_times: &[f64]) -> Result<Vec<usize>> {
    if sample_times.is_empty() {
        return Err(Error::config("sample_times", "need at least one sample time"));
    }
    let n_steps = config.n_steps();
    let mut out = Vec::with_capacity(sample_times.len());
    for (i, &t) in sample_times.iter().enumerate() {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::config("sample_times", format!("invalid time {t}")));
        }
        if i > 0 && t <= sample_times[i - 1] {
            return Err(Error::config("sample_times", "must be strictly ascending"));
        }
        let k = (t / config.step).round();
        if (k * config.step - t).abs() > 1e-6 * config.step || k as usize > n_steps {
            return Err(Error::config(
                "sample_times",
                format!("time {t} is not on the step grid within the horizon {}", config.horizon),
            ));
        }
        out.push(k as usize);
    }
    Ok(out)
}

/// Monte Carlo estimate of `u(y₀, τ)` at each sample time.
pub fn estimate_u(config: &PathConfig, coherence: f64, sample_times: &[f64]) -> Result<UCurve> {
    config.validate()?;
    if !(coherence.is_finite() && coherence > 0.0) {
        return Err(Error::config("coherence", format!("must be finite and positive, got {coherence}")));
    }
    let indices = sample_indices(config, sample_times)?;
    let last = *indices.last().expect("non-empty");
    let eps = epsilon_for(coherence);
    let sd = (DIFFUSION_VARIANCE_RATE * config.step).sqrt();
    let half_step = 0.5 * config.step;
    let y0 = config.initial_point;
    let antithetic = config.antithetic;

    let observe = |rng: &mut ChaCha8Rng, out: &mut [f64]| {
        let (mut ya, mut yb) = (y0, y0);
        let v0 = fk_potential(y0, eps);
        let (mut va, mut vb) = (v0, v0);
        let (mut ia, mut ib) = (0.0, 0.0);
        let mut next = 0;
        for k in 0..=last {
            if k > 0 {
                let z: f64 = StandardNormal.sample(rng);
                ya += sd * z;
                let va_new = fk_potential(ya, eps);
                ia += half_step * (va + va_new);
                va = va_new;
                if antithetic {
                    yb -= sd * z;
                    let vb_new = fk_potential(yb, eps);
                    ib += half_step * (vb + vb_new);
                    vb = vb_new;
                }
            }
            while next < indices.len() && indices[next] == k {
                out[next] = if antithetic { 0.5 * ((-ia).exp() + (-ib).exp()) } else { (-ia).exp() };
                next += 1;
            }
        }
    };
    let ens = ensemble(config.n_observations(), indices.len(), config.seed, observe);
    Ok(UCurve {
        times: sample_times.to_vec(),
        u_mean: ens.total.iter().map(|e| e.mean).collect(),
        u_stderr: ens.total.iter().map(|e| e.stderr).collect(),
        n_paths: config.n_paths,
        seed: config.seed,
        n_observations: ens.n_obs,
        batches: ens.batches,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StderrMethod {
    /// Delete-one-batch jackknife over independent path batches.
    Jackknife,
    /// Residual scatter about the fitted line.
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FKEstimate {
    /// `λ̂₀/√(Ṅℓ)`.
    pub lambda_hat: f64,
    pub stderr: f64,
    pub fit_window: (f64, f64),
    pub r_squared: f64,
    /// `ln(c₀u₀(0))` estimate.
    pub intercept: f64,
    pub n_points: usize,
    pub stderr_method: StderrMethod,
}

/// Fit `ln u = intercept − λ̂τ` over the sample times inside `window`.
///
/// Points are weighted by `(u/σ)²` when every standard error in the window is
/// positive, uniformly otherwise.
pub fn fit_decay_rate(curve: &UCurve, window: (f64, f64)) -> Result<FKEstimate> {
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::config("window", format!("invalid window [{a}, {b}]")));
    }
    let tol = 1e-9 * b.abs().max(1.0);
    let idx: Vec<usize> = (0..curve.times.len())
        .filter(|&i| curve.times[i] >= a - tol && curve.times[i] <= b + tol)
        .collect();
    if idx.len() < 3 {
        return Err(Error::config(
            "window",
            format!("window [{a}, {b}] holds {} sample times, need at least 3", idx.len()),
        ));
    }
    if let Some(&i) = idx.iter().find(|&&i| !(curve.u_mean[i] > 0.0)) {
        return Err(Error::FitDomain(format!(
            "u = {} at t = {}: horizon too long for the path count",
            curve.u_mean[i], curve.times[i]
        )));
    }
    let x: Vec<f64> = idx.iter().map(|&i| curve.times[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| curve.u_mean[i].ln()).collect();
    let w: Vec<f64> = if idx.iter().all(|&i| curve.u_stderr[i] > 0.0) {
        idx.iter().map(|&i| (curve.u_mean[i] / curve.u_stderr[i]).powi(2)).collect()
    } else {
        vec![1.0; idx.len()]
    };
    let fit = weighted_line_fit(&x, &y, &w);
    let lambda_hat = -fit.slope;
    if !(lambda_hat > 0.0) {
        return Err(Error::FitDomain(format!("curve does not decay in the window (slope {})", fit.slope)));
    }

    let (stderr, stderr_method) = if curve.batches.len() >= 2 {
        let total_n = curve.n_observations as f64;
        let total: Vec<f64> = idx.iter().map(|&i| curve.u_mean[i] * total_n).collect();
        let mut slopes = Vec::with_capacity(curve.batches.len());
        for batch in &curve.batches {
            let rest = total_n - batch.count as f64;
            let mut yb = Vec::with_capacity(idx.len());
            for (j, &i) in idx.iter().enumerate() {
                let u = (total[j] - batch.sums[i]) / rest;
                if !(u > 0.0) {
                    return Err(Error::FitDomain(format!("jackknife replicate has u = {u} at t = {}", curve.times[i])));
                }
                yb.push(u.ln());
            }
            slopes.push(weighted_line_fit(&x, &yb, &w).slope);
        }
        let nb = slopes.len() as f64;
        let mean = slopes.iter().sum::<f64>() / nb;
        let var = (nb - 1.0) / nb * slopes.iter().map(|s| (s - mean).powi(2)).sum::<f64>();
        (var.sqrt(), StderrMethod::Jackknife)
    } else {
        (fit.slope_stderr, StderrMethod::Residual)
    };

    Ok(FKEstimate {
        lambda_hat,
        stderr,
        fit_window: (a, b),
        r_squared: fit.r_squared,
        intercept: fit.intercept,
        n_points: idx.len(),
        stderr_method,
    })
}

/// Convenience: sample `u` every `sample_interval` and fit over `window`.
pub fn estimate_decay_rate(
    config: &PathConfig,
    coherence: f64,
    sample_interval: f64,
    window: (f64, f64),
) -> Result<(UCurve, FKEstimate)> {
    config.validate()?;
    if window.1 > config.horizon + 1e-9 {
        return Err(Error::config("horizon", format!("horizon {} ends before the fit window {:?}", config.horizon, window)));
    }
    let times = config.sample_times(sample_interval);
    let curve = estimate_u(config, coherence, &times)?;
    let fit = fit_decay_rate(&curve, window)?;
    Ok((curve, fit))
}

/// Purity of `K` equal segments spanning `duration`, straight from the discrete
/// product of coherent-state overlaps over two independent phase walks.
///
/// Phases are sampled at the right end `t_k = kT/K` of each segment, `k = 1..=K`,
/// both walks starting from the same known phase. Only the phase difference
/// enters the overlaps, so it is sampled directly.
pub fn segment_purity_mc(
    beam: &BeamParams,
    segments: usize,
    duration: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if segments == 0 {
        return Err(Error::config("segments", "need at least one segment"));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::config("duration", format!("must be positive, got {duration}")));
    }
    if n_samples == 0 {
        return Err(Error::config("n_samples", "need at least one sample"));
    }
    let dt = duration / segments as f64;
    let r2 = beam.photon_flow() * dt;
    // W − V of two independent walks is itself a walk with twice the variance
    let sd = (2.0 * beam.linewidth() * dt).sqrt();
    let observe = |rng: &mut ChaCha8Rng, out: &mut [f64]| {
        let mut delta = 0.0f64;
        let mut exponent = 0.0;
        for _ in 0..segments {
            let z: f64 = StandardNormal.sample(rng);
            delta += sd * z;
            let s = (0.5 * delta).sin();
            exponent += s * s;
        }
        out[0] = (-4.0 * r2 * exponent).exp();
    };
    let ens = ensemble(n_samples, 1, seed, observe);
    Ok(ens.total[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::beam_from_rates;
    use std::f64::consts::PI;

    fn cfg(step: f64, horizon: f64, n_paths: usize, seed: u64) -> PathConfig {
        PathConfig { step, horizon, n_paths, seed, ..PathConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert!(matches!(cfg(0.0, 1.0, 10, 0).validate(), Err(Error::Config { param: "step", .. })));
        assert!(matches!(cfg(0.1, 0.05, 10, 0).validate(), Err(Error::Config { param: "horizon", .. })));
        assert!(matches!(cfg(0.1, 1.0, 0, 0).validate(), Err(Error::Config { param: "n_paths", .. })));
        let odd = PathConfig { antithetic: true, ..cfg(0.1, 1.0, 3, 0) };
        assert!(odd.validate().is_err());
    }

    #[test]
    fn wiener_moments() {
        let batch = simulate_difference_paths(&cfg(0.01, 1.0, 10_000, 42)).unwrap();
        assert_eq!(batch.paths.len(), 10_000);
        assert_eq!(batch.paths[0].len(), 101);
        let ends: Vec<f64> = batch.paths.iter().map(|p| p[100]).collect();
        let n = ends.len() as f64;
        let mean = ends.iter().sum::<f64>() / n;
        let var = ends.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // variance of y(1) is 2
        assert!(mean.abs() < 3.0 * (2.0 / n).sqrt(), "mean {mean}");
        assert!((var / DIFFUSION_VARIANCE_RATE - 1.0).abs() < 0.05, "var {var}");
        // underlying unit-rate Wiener process
        let unit_var = var / DIFFUSION_VARIANCE_RATE;
        assert!((unit_var - 1.0).abs() < 0.05);
    }

    #[test]
    fn paths_are_reproducible() {
        let a = simulate_difference_paths(&cfg(0.01, 0.5, 100, 9)).unwrap();
        let b = simulate_difference_paths(&cfg(0.01, 0.5, 100, 9)).unwrap();
        assert_eq!(a, b);
        let c = simulate_difference_paths(&cfg(0.01, 0.5, 100, 10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn antithetic_paths_mirror() {
        let config = PathConfig { antithetic: true, initial_point: 0.3, ..cfg(0.1, 1.0, 4, 1) };
        let batch = simulate_difference_paths(&config).unwrap();
        for pair in batch.paths.chunks(2) {
            for (a, b) in pair[0].iter().zip(&pair[1]) {
                assert!((a + b - 0.6).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weight_of_constant_paths() {
        let c = 7.0;
        assert_eq!(fk_weight(&[0.0; 11], 0.1, c).unwrap(), 1.0);
        let eps = epsilon_for(c);
        let top = vec![PI / (2.0 * eps); 11];
        let w = fk_weight(&top, 0.1, c).unwrap();
        assert!((w - (-1.0 / (eps * eps)).exp()).abs() < 1e-14);
        assert!(fk_weight(&[], 0.1, c).is_err());
        assert!(fk_weight(&[1.0], 0.1, c).is_err());
    }

    #[test]
    fn weight_matches_hand_trapezoid() {
        // coherence 1, τ = 0.1: ε = 4^{-1/4}
        let batch = simulate_difference_paths(&cfg(0.01, 0.1, 1, 3)).unwrap();
        let path = &batch.paths[0];
        let eps = 0.25f64.powf(0.25);
        let mut integral = 0.0;
        for k in 0..path.len() - 1 {
            let f0 = (eps * path[k]).sin().powi(2) / (eps * eps);
            let f1 = (eps * path[k + 1]).sin().powi(2) / (eps * eps);
            integral += 0.01 * (f0 + f1) / 2.0;
        }
        let w = fk_weight(path, 0.01, 1.0).unwrap();
        assert!((w - (-integral).exp()).abs() < 1e-15);
    }

    #[test]
    fn estimate_u_matches_batch_weights() {
        let config = cfg(0.02, 0.4, 50, 5);
        let curve = estimate_u(&config, 10.0, &[0.0, 0.2, 0.4]).unwrap();
        assert_eq!(curve.u_mean[0], 1.0);
        assert_eq!(curve.u_stderr[0], 0.0);
        let batch = simulate_difference_paths(&config).unwrap();
        let mean = batch.paths.iter().map(|p| fk_weight(&p[..11], 0.02, 10.0).unwrap()).sum::<f64>() / 50.0;
        assert!((curve.u_mean[1] - mean).abs() < 1e-13);
        let mean = batch.paths.iter().map(|p| fk_weight(p, 0.02, 10.0).unwrap()).sum::<f64>() / 50.0;
        assert!((curve.u_mean[2] - mean).abs() < 1e-13);
    }

    #[test]
    fn estimate_u_rejects_off_grid_times() {
        let config = cfg(0.1, 1.0, 10, 0);
        assert!(estimate_u(&config, 1.0, &[0.0, 0.15]).is_err());
        assert!(estimate_u(&config, 1.0, &[0.5, 0.2]).is_err());
        assert!(estimate_u(&config, 1.0, &[2.0]).is_err());
        assert!(estimate_u(&config, 0.0, &[0.5]).is_err());
    }

    #[test]
    fn weights_in_unit_interval_and_jensen() {
        let config = cfg(0.01, 2.0, 4000, 11);
        let times = config.sample_times(0.25);
        let curve = estimate_u(&config, 25.0, &times).unwrap();
        for i in 0..times.len() {
            assert!(curve.u_mean[i] > 0.0 && curve.u_mean[i] <= 1.0);
            let bound = jensen_lower_bound(25.0, times[i]);
            assert!(curve.u_mean[i] >= bound - 3.0 * curve.u_stderr[i], "t={}", times[i]);
            if i > 0 {
                assert!(curve.u_mean[i] <= curve.u_mean[i - 1] + 3.0 * curve.u_stderr[i]);
            }
        }
    }

    #[test]
    fn mean_path_integral_by_quadrature() {
        // E[sin²(εy(t))] for y(t) ~ N(0, 2t), integrated in t numerically
        let c = 4.0;
        let eps = epsilon_for(c);
        let tau = 1.5;
        let n = 20_000;
        let h = tau / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            // Gauss–Hermite would do; a fine midpoint rule in y is plenty here
            let s = (2.0 * t).sqrt();
            let m = 400;
            let mut e = 0.0;
            let mut norm = 0.0;
            for j in 0..m {
                let z = -8.0 + 16.0 * (j as f64 + 0.5) / m as f64;
                let g = (-0.5 * z * z).exp();
                e += g * (eps * s * z).sin().powi(2);
                norm += g;
            }
            total += h * e / norm / (eps * eps);
        }
        assert!((mean_path_integral(c, tau) - total).abs() < 1e-6 * total);
    }

    fn synthetic(times: &[f64], f: impl Fn(f64) -> f64) -> UCurve {
        UCurve {
            times: times.to_vec(),
            u_mean: times.iter().map(|&t| f(t)).collect(),
            u_stderr: vec![0.0; times.len()],
            n_paths: 1,
            seed: 0,
            n_observations: 1,
            batches: Vec::new(),
        }
    }

    #[test]
    fn fit_exact_exponentials() {
        let times: Vec<f64> = (0..=80).map(|k| k as f64 * 0.1).collect();
        let fit = fit_decay_rate(&synthetic(&times, |t| (-0.7 * t).exp()), (2.0, 6.0)).unwrap();
        assert!((fit.lambda_hat - 0.7).abs() < 1e-12);
        assert!(fit.stderr < 1e-7);
        assert_eq!(fit.n_points, 41);

        let fit = fit_decay_rate(&synthetic(&times, |t| 2.0 * (-t).exp()), (2.0, 6.0)).unwrap();
        assert!((fit.lambda_hat - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_domain_errors() {
        let times: Vec<f64> = (0..=10).map(|k| k as f64).collect();
        let curve = synthetic(&times, |t| if t > 4.0 { 0.0 } else { (-t).exp() });
        assert!(matches!(fit_decay_rate(&curve, (2.0, 6.0)), Err(Error::FitDomain(_))));
        assert!(matches!(fit_decay_rate(&curve, (2.0, 3.0)), Err(Error::Config { .. })));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let config = cfg(0.05, 2.0, 3000, 77);
        let times = config.sample_times(0.5);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_u(&config, 50.0, &times).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.u_mean, b.u_mean);
        assert_eq!(a.u_stderr, b.u_stderr);
        assert_eq!(a.batches, b.batches);
    }

    #[test]
    fn segment_purity_limits() {
        let vac = beam_from_rates(0.0, 5.0, 1.0).unwrap();
        let e = segment_purity_mc(&vac, 4, 1.0, 100, 1).unwrap();
        assert_eq!(e.mean, 1.0);
        let still = beam_from_rates(5.0, 0.0, 1.0).unwrap();
        assert_eq!(segment_purity_mc(&still, 4, 1.0, 100, 1).unwrap().mean, 1.0);
        // vanishing duration: pure coherent state
        let beam = beam_from_rates(1.0, 1.0, 1.0).unwrap();
        let e = segment_purity_mc(&beam, 1, 1e-9, 100, 1).unwrap();
        assert!((e.mean - 1.0).abs() < 1e-8);
        assert!(segment_purity_mc(&beam, 0, 1.0, 100, 1).is_err());
    }
}
