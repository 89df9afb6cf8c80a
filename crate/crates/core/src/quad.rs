//! Quadrature rules.
//!
//! * adaptive Gauss–Kronrod (7/15) on finite intervals, used for the thermal
//!   integrals with their integrable logarithmic endpoint singularities;
//! * Gauss–Hermite nodes via Golub–Welsch;
//! * expectations of 2π-periodic functions under a Gaussian phase, which is
//!   the same as integrating against the wrapped normal density.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS_K[7] * fc;
    let mut gauss = GK_WEIGHTS_G[3] * fc;
    for j in 0..7 {
        let dx = h * GK_NODES[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS_K[j] * pair;
        if j % 2 == 1 {
            gauss += GK_WEIGHTS_G[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]` to relative tolerance `rel_tol`.
/// Endpoints are never evaluated.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut intervals = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..5000 {
        let total: f64 = intervals.iter().map(|(_, _, (v, _))| v).sum();
        let err: f64 = intervals.iter().map(|(_, _, (_, e))| e).sum();
        if err <= rel_tol * total.abs() || err < f64::MIN_POSITIVE {
            return Ok(total);
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| (x.1).2 .1.partial_cmp(&(y.1).2 .1).unwrap())
            .expect("non-empty");
        let (lo, hi, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        intervals.push((lo, mid, gk15(&f, lo, mid)));
        intervals.push((mid, hi, gk15(&f, mid, hi)));
    }
    Err(Error::Numerical(format!("adaptive quadrature on [{a}, {b}] did not converge")))
}

/// `n`-point Gauss–Hermite rule for the weight `e^{-x²}`, weights summing to `√π`.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], PI.sqrt() * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

/// Nodes and weights for `E[f(φ)]`, `φ ~ N(0, variance)`, where `f` is 2π-periodic
/// with negligible Fourier content above harmonic `bandwidth`.
///
/// Narrow phase distributions use Gauss–Hermite; wide ones use the trapezoid rule
/// on one period against the wrapped normal density, whose Fourier
/// coefficients `exp(-variance·q²/2)` are summed directly. Weights sum to 1.
pub fn periodic_gaussian_rule(variance: f64, bandwidth: usize, min_nodes: usize) -> Vec<(f64, f64)> {
    if variance == 0.0 {
        return vec![(0.0, 1.0)];
    }
    let sigma = variance.sqrt();
    let b = bandwidth.max(1) as f64;
    if sigma * b <= 4.0 {
        let n = min_nodes.clamp(64, 256);
        let scale = (2.0 * variance).sqrt();
        return gauss_hermite(n)
            .into_iter()
            .map(|(x, w)| (scale * x, w / PI.sqrt()))
            .collect();
    }
    // aliasing error ~ exp(-variance (N - bandwidth)² / 2) < 1e-17
    let alias_cut = (2.0 * 40.0f64).sqrt() / sigma;
    let n = ((b + alias_cut).ceil() as usize + 1).max(min_nodes);
    let q_max = (alias_cut.ceil() as usize).max(1);
    let coeffs: Vec<f64> = (1..=q_max).map(|q| (-0.5 * variance * (q * q) as f64).exp()).collect();
    (0..n)
        .map(|j| {
            let phi = -PI + 2.0 * PI * j as f64 / n as f64;
            let series: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * ((i + 1) as f64 * phi).cos())
                .sum();
            (phi, (1.0 + 2.0 * series) / n as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_and_log() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-14).unwrap();
        assert!((v - 9.0).abs() < 1e-13);
        // ∫₀¹ -ln x = 1
        let v = integrate(|x: f64| -x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hermite_moments() {
        let rule = gauss_hermite(20);
        let w: f64 = rule.iter().map(|r| r.1).sum();
        assert!((w - PI.sqrt()).abs() < 1e-13);
        // ∫ x⁴ e^{-x²} = 3√π/4
        let m4: f64 = rule.iter().map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.75 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_characteristic_function() {
        // E[cos kφ] = exp(-v k²/2) in both regimes
        for &v in &[1e-6, 0.01, 0.1, 0.5, 2.0, 30.0] {
            for k in [0usize, 1, 3, 10, 25] {
                let rule = periodic_gaussian_rule(v, 25, 32);
                let got: f64 = rule.iter().map(|(p, w)| w * (k as f64 * p).cos()).sum();
                let want = (-0.5 * v * (k * k) as f64).exp();
                assert!((got - want).abs() < 1e-13, "v={v} k={k}: {got} vs {want}");
            }
        }
    }
}
