//! Coherent states, phase-averaged density matrices and purities in a truncated
//! number basis. Small and exact: the reference the Monte Carlo and spectral
//! routes are checked against.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::periodic_gaussian_rule;

/// Truncation deficit above which a Fock vector is flagged.
pub const DEFICIT_WARN: f64 = 1e-8;
/// Truncation deficit above which a density matrix is refused.
pub const DEFICIT_MAX: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitude {
    modulus: f64,
    phase: f64,
}

impl CoherentAmplitude {
    pub fn new(modulus: f64, phase: f64) -> Result<Self> {
        if !(modulus.is_finite() && modulus >= 0.0) {
            return Err(Error::domain("modulus", format!("must be finite and non-negative, got {modulus}")));
        }
        if !phase.is_finite() {
            return Err(Error::domain("phase", "must be finite"));
        }
        Ok(Self { modulus, phase: phase.rem_euclid(2.0 * PI) })
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    /// In `[0, 2π)`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn to_complex(&self) -> C64 {
        C64::from_polar(self.modulus, self.phase)
    }
}

/// `|⟨α|β⟩|² = exp(-|α − β|²)`.
pub fn coherent_overlap_sq(a: &CoherentAmplitude, b: &CoherentAmplitude) -> f64 {
    let dist2 = a.modulus * a.modulus + b.modulus * b.modulus
        - 2.0 * a.modulus * b.modulus * (a.phase - b.phase).cos();
    (-dist2.max(0.0)).exp()
}

/// `ln P(n)` for `n = 0..=n_max`, `P` Poisson with mean `mean`.
fn poisson_log_pmf(mean: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let ln_mean = if mean > 0.0 { mean.ln() } else { f64::NEG_INFINITY };
    let mut ln_fact = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let term = if n == 0 { -mean } else { -mean + n as f64 * ln_mean - ln_fact };
        out.push(term);
    }
    out
}

/// `P(n)` for `n = 0..=n_max`.
pub fn poisson_pmf(mean: f64, n_max: usize) -> Vec<f64> {
    poisson_log_pmf(mean, n_max).into_iter().map(f64::exp).collect()
}

/// `Σ_{n > n_max} P(n)`, summed directly rather than as `1 − Σ_{n ≤ n_max}`.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_head = poisson_log_pmf(mean, n_max);
    let mut ln_p = ln_head[n_max];
    let mut tail = 0.0;
    let mut n = n_max + 1;
    let stop = n_max + 50 + (mean + 40.0 * (mean + 1.0).sqrt()) as usize;
    while n <= stop {
        ln_p += mean.ln() - (n as f64).ln();
        let p = ln_p.exp();
        tail += p;
        if (n as f64) > mean && p < 1e-18 * tail.max(f64::MIN_POSITIVE) {
            break;
        }
        n += 1;
    }
    tail.min(1.0)
}

/// `⌈r² + 10√(r² + 1)⌉`.
pub fn default_n_max(r: f64) -> usize {
    let m = r * r;
    (m + 10.0 * (m + 1.0).sqrt()).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Vec<C64>,
    /// `1 − Σ|cₙ|²` of the untruncated state.
    pub deficit: f64,
}

impl FockVector {
    pub fn truncation_insufficient(&self) -> bool {
        self.deficit > DEFICIT_WARN
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }
}

/// `cₙ = e^{-r²/2}(re^{iφ})ⁿ/√(n!)` for `n = 0..=n_max`.
pub fn coherent_fock_vector(a: &CoherentAmplitude, n_max: usize) -> FockVector {
    let r2 = a.modulus * a.modulus;
    let amplitudes = poisson_log_pmf(r2, n_max)
        .into_iter()
        .enumerate()
        .map(|(n, lp)| C64::from_polar((0.5 * lp).exp(), n as f64 * a.phase))
        .collect();
    FockVector { amplitudes, deficit: poisson_tail(r2, n_max) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
    truncation_deficit: f64,
}

/// JSON form: `{dim, entries: [[re, im], …]}` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub dim: usize,
    pub truncation_deficit: f64,
    pub entries: Vec<[f64; 2]>,
}

impl DensityMatrix {
    /// Wraps a Hermitian matrix (checked to 1e-12).
    pub fn from_matrix(entries: DMatrix<C64>, truncation_deficit: f64) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::domain("rho", "density matrix must be square and non-empty"));
        }
        let rho = Self { entries, truncation_deficit };
        if rho.hermiticity_error() > 1e-12 {
            return Err(Error::domain("rho", format!("not Hermitian (error {:e})", rho.hermiticity_error())));
        }
        Ok(rho)
    }

    pub fn pure(v: &FockVector) -> Self {
        let col = nalgebra::DVector::from_vec(v.amplitudes.clone());
        Self { entries: &col * col.adjoint(), truncation_deficit: v.deficit }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { entries: DMatrix::from_diagonal_element(dim, dim, C64::new(1.0 / dim as f64, 0.0)), truncation_deficit: 0.0 }
    }

    /// Single-mode thermal state `n̄ⁿ/(n̄+1)^{n+1}` truncated at `n_max`.
    pub fn thermal(mean_occupation: f64, n_max: usize) -> Self {
        let q = mean_occupation / (mean_occupation + 1.0);
        let diag: Vec<C64> = (0..=n_max)
            .map(|n| C64::new((1.0 - q) * q.powi(n as i32), 0.0))
            .collect();
        Self {
            entries: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
            truncation_deficit: q.powi(n_max as i32 + 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Photon-number distribution.
    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                err = err.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// `Tr ρ² = Σ|ρᵢⱼ|²` for Hermitian `ρ`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `S₂/k_B = −ln Tr ρ²`.
    pub fn renyi2_entropy(&self) -> f64 {
        -self.purity().ln()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn to_json(&self) -> DensityMatrixJson {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        DensityMatrixJson { dim: n, truncation_deficit: self.truncation_deficit, entries }
    }

    pub fn from_json(json: &DensityMatrixJson) -> Result<Self> {
        if json.entries.len() != json.dim * json.dim {
            return Err(Error::domain("entries", "length must be dim²"));
        }
        let m = DMatrix::from_row_iterator(
            json.dim,
            json.dim,
            json.entries.iter().map(|[re, im]| C64::new(*re, *im)),
        );
        Self::from_matrix(m, json.truncation_deficit)
    }
}

pub const MIN_PHASE_GRID: usize = 32;

/// `E_φ[|re^{iφ}⟩⟨re^{iφ}|]` with `φ` normally distributed (mean 0, variance
/// `phase_variance`, wrapped onto the circle), integrated numerically with at
/// least `n_grid` nodes.
pub fn phase_averaged_state(r: f64, phase_variance: f64, n_grid: usize, n_max: usize) -> Result<DensityMatrix> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::domain("r", format!("must be finite and non-negative, got {r}")));
    }
    if !(phase_variance >= 0.0) {
        return Err(Error::domain("phase_variance", format!("must be non-negative, got {phase_variance}")));
    }
    if n_grid < MIN_PHASE_GRID {
        return Err(Error::config("n_grid", format!("need at least {MIN_PHASE_GRID}, got {n_grid}")));
    }
    let base = coherent_fock_vector(&CoherentAmplitude::new(r, 0.0)?, n_max);
    if base.deficit > DEFICIT_MAX {
        return Err(Error::Truncation { deficit: base.deficit, limit: DEFICIT_MAX, n_max });
    }
    let mags: Vec<f64> = base.amplitudes.iter().map(|c| c.re).collect();
    let dim = n_max + 1;
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    if phase_variance.is_infinite() {
        for n in 0..dim {
            rho[(n, n)] = C64::new(mags[n] * mags[n], 0.0);
        }
    } else {
        for (phi, w) in periodic_gaussian_rule(phase_variance, n_max, n_grid) {
            let v: Vec<C64> = mags.iter().enumerate().map(|(n, m)| C64::from_polar(*m, n as f64 * phi)).collect();
            for i in 0..dim {
                for j in 0..dim {
                    rho[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        // exact Hermitian symmetry
        for i in 0..dim {
            rho[(i, i)].im = 0.0;
            for j in 0..i {
                let avg = 0.5 * (rho[(i, j)] + rho[(j, i)].conj());
                rho[(i, j)] = avg;
                rho[(j, i)] = avg.conj();
            }
        }
    }
    Ok(DensityMatrix { entries: rho, truncation_deficit: base.deficit })
}

/// `E_Δ[exp(-4r² sin²(Δ/2))]`, `Δ ~ N(0, phase_difference_variance)`: the
/// one-segment purity with two independent phase walks. Node count is doubled
/// until successive estimates agree to 1e-12.
pub fn single_segment_purity_quadrature(r: f64, phase_difference_variance: f64) -> Result<f64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::domain("r", format!("must be finite and non-negative, got {r}")));
    }
    if !(phase_difference_variance >= 0.0) {
        return Err(Error::domain(
            "phase_difference_variance",
            format!("must be non-negative, got {phase_difference_variance}"),
        ));
    }
    let r2 = r * r;
    let integrand = |d: f64| {
        let s = (0.5 * d).sin();
        (-4.0 * r2 * s * s).exp()
    };
    if phase_difference_variance.is_infinite() {
        // uniform phase: mean over one period
        let n = 4 * (default_n_max(r) + 64);
        return Ok((0..n).map(|j| integrand(2.0 * PI * j as f64 / n as f64)).sum::<f64>() / n as f64);
    }
    // harmonics of exp(2r² cos Δ) are negligible beyond ~2r² + 10√(2r²) + 20
    let mut bandwidth = (2.0 * r2 + 10.0 * (2.0 * r2).sqrt() + 20.0).ceil() as usize;
    let eval = |b: usize| -> f64 {
        periodic_gaussian_rule(phase_difference_variance, b, 64)
            .into_iter()
            .map(|(d, w)| w * integrand(d))
            .sum()
    };
    let mut prev = eval(bandwidth);
    for _ in 0..8 {
        bandwidth *= 2;
        let next = eval(bandwidth);
        if (next - prev).abs() <= 1e-12 * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical("single-segment quadrature did not converge".into()))
}

/// `Σₙ P(n)²` for Poisson mean `r²`: purity of the fully dephased state.
pub fn uniform_phase_purity(r: f64) -> f64 {
    poisson_pmf(r * r, default_n_max(r) + 40).iter().map(|p| p * p).sum()
}

/// Exact purity of `K ≤ 3` consecutive segments sampled at `t_k = k·δt`,
/// where the phase walk has variance `segment_phase_variance` per segment.
///
/// `Tr ρ² = Σ_d C(d) exp(-dᵀΣd)` over photon-number differences `d ∈ ℤᴷ`, with
/// `C(d) = Πₖ Σₘ P(m)P(m + dₖ)` and `Σⱼₖ = v·min(j, k)`.
pub fn multi_segment_purity(r: f64, segment_phase_variance: f64, segments: usize, n_max: usize) -> Result<f64> {
    if segments == 0 || segments > 3 {
        return Err(Error::domain("segments", format!("exact tensor product limited to 1..=3 segments, got {segments}")));
    }
    if !(r.is_finite() && r >= 0.0 && r * r <= 4.0) {
        return Err(Error::domain("r", format!("exact tensor product limited to r² ≤ 4, got r = {r}")));
    }
    if !(segment_phase_variance >= 0.0 && segment_phase_variance.is_finite()) {
        return Err(Error::domain("segment_phase_variance", "must be finite and non-negative"));
    }
    let deficit = poisson_tail(r * r, n_max);
    if deficit > DEFICIT_MAX {
        return Err(Error::Truncation { deficit, limit: DEFICIT_MAX, n_max });
    }
    let p = poisson_pmf(r * r, n_max);
    let n = n_max as i64;
    let corr = |d: i64| -> f64 {
        let d = d.unsigned_abs() as usize;
        (0..=n_max - d).map(|m| p[m] * p[m + d]).sum()
    };
    let c: Vec<f64> = (-n..=n).map(corr).collect();
    let v = segment_phase_variance;
    let mut total = 0.0;
    let width = (2 * n + 1) as usize;
    let count = width.pow(segments as u32);
    for flat in 0..count {
        let mut rem = flat;
        let mut d = [0i64; 3];
        let mut weight = 1.0;
        for slot in d.iter_mut().take(segments) {
            let k = rem % width;
            rem /= width;
            *slot = k as i64 - n;
            weight *= c[k];
        }
        if weight == 0.0 {
            continue;
        }
        let mut quad = 0.0;
        for j in 0..segments {
            for k in 0..segments {
                quad += (d[j] * d[k]) as f64 * (j.min(k) + 1) as f64;
            }
        }
        total += weight * (-v * quad).exp();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amp(r: f64, phi: f64) -> CoherentAmplitude {
        CoherentAmplitude::new(r, phi).unwrap()
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(coherent_overlap_sq(&amp(1.3, 0.4), &amp(1.3, 0.4)), 1.0);
        assert!((coherent_overlap_sq(&amp(1.0, 0.0), &amp(1.0, PI)) - (-4.0f64).exp()).abs() < 1e-15);
        let q = coherent_overlap_sq(&amp(1.0, 0.0), &amp(1.0, PI / 2.0));
        assert!((q - (-2.0f64).exp()).abs() < 1e-15);
        assert!((q - (-4.0 * (PI / 4.0).sin().powi(2)).exp()).abs() < 1e-15);
        assert!((q - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn amplitude_validation() {
        assert!(CoherentAmplitude::new(-1.0, 0.0).is_err());
        let a = amp(1.0, -PI / 2.0);
        assert!((a.phase() - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn fock_vectors() {
        let vac = coherent_fock_vector(&amp(0.0, 1.0), 5);
        assert_eq!(vac.amplitudes[0], C64::new(1.0, 0.0));
        assert!(vac.amplitudes[1..].iter().all(|c| *c == C64::new(0.0, 0.0)));
        assert_eq!(vac.deficit, 0.0);

        let v = coherent_fock_vector(&amp(1.0, 0.3), 20);
        assert!(v.deficit < 1e-15 && v.deficit > 0.0);
        assert!(!v.truncation_insufficient());
        let short = coherent_fock_vector(&amp(3.0, 0.0), 5);
        assert!(short.truncation_insufficient());
        // tail summed directly agrees with 1 - head where that is accurate
        let head: f64 = short.amplitudes.iter().map(|c| c.norm_sqr()).sum();
        assert!((short.deficit - (1.0 - head)).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_basics() {
        let pure = DensityMatrix::pure(&coherent_fock_vector(&amp(1.0, 0.2), 30));
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(7);
        assert!((mixed.purity() - 1.0 / 7.0).abs() < 1e-15);
        let thermal = DensityMatrix::thermal(1.0, 60);
        assert!((thermal.purity() - 1.0 / 3.0).abs() < 1e-8);
        assert!((thermal.renyi2_entropy() - 3f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn density_matrix_json_round_trip() {
        let rho = phase_averaged_state(0.7, 0.3, 32, 12).unwrap();
        let json = serde_json::to_string(&rho.to_json()).unwrap();
        let back = DensityMatrix::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn phase_average_limits() {
        let pure = phase_averaged_state(1.2, 0.0, 32, 40).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);

        let r = 1.5;
        let uniform = phase_averaged_state(r, f64::INFINITY, 32, 40).unwrap();
        assert!((uniform.purity() - uniform_phase_purity(r)).abs() < 1e-10);
        let wide = phase_averaged_state(r, 60.0, 32, 40).unwrap();
        assert!((wide.purity() - uniform_phase_purity(r)).abs() < 1e-10);
    }

    #[test]
    fn phase_average_matches_closed_form_coherences() {
        // ρₘₙ = √(PₘPₙ) exp(-v(m−n)²/2)
        let (r, v) = (1.3, 0.4);
        let rho = phase_averaged_state(r, v, 32, 30).unwrap();
        let p = poisson_pmf(r * r, 30);
        for m in 0..=30 {
            for n in 0..=30 {
                let d = m as f64 - n as f64;
                let want = (p[m] * p[n]).sqrt() * (-0.5 * v * d * d).exp();
                assert!((rho.entries()[(m, n)] - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn truncation_refused() {
        assert!(matches!(phase_averaged_state(3.0, 0.1, 32, 5), Err(Error::Truncation { .. })));
        assert!(phase_averaged_state(1.0, 0.1, 16, 20).is_err());
    }

    #[test]
    fn quadrature_limits() {
        assert_eq!(single_segment_purity_quadrature(1.0, 0.0).unwrap(), 1.0);
        for r in [0.5, 1.0, 2.0] {
            let inf = single_segment_purity_quadrature(r, f64::INFINITY).unwrap();
            assert!((inf - uniform_phase_purity(r)).abs() < 1e-12);
            let big = single_segment_purity_quadrature(r, 200.0).unwrap();
            assert!((big - uniform_phase_purity(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_segment_is_one_segment_product() {
        for &(r, v) in &[(0.5, 0.1), (1.0, 0.5), (2.0, 2.0)] {
            let exact = multi_segment_purity(r, v, 1, default_n_max(r)).unwrap();
            let quad = single_segment_purity_quadrature(r, 2.0 * v).unwrap();
            assert!((exact - quad).abs() < 1e-10, "r={r} v={v}: {exact} vs {quad}");
        }
    }

    #[test]
    fn multi_segment_restrictions() {
        assert!(multi_segment_purity(1.0, 0.1, 4, 20).is_err());
        assert!(multi_segment_purity(2.5, 0.1, 2, 60).is_err());
        assert!((multi_segment_purity(1.0, 0.0, 3, 30).unwrap() - 1.0).abs() < 1e-12);
    }
}
