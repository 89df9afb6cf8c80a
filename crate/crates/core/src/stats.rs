//! Order-stable reductions and straight-line fits.

use serde::{Deserialize, Serialize};

/// Pairwise (cascade) summation. The result depends only on the order of
/// `values`, never on how work was split between threads.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// From a sum and a sum of squares over `n` samples.
    pub fn from_sums(sum: f64, sum_sq: f64, n: usize) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let stderr = if n > 1 {
            let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, n }
    }

    /// Distance from `value` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.stderr
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual-based standard error of the slope.
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// Weighted least squares `y ≈ intercept + slope·x`. Needs at least 3 points.
pub fn weighted_line_fit(x: &[f64], y: &[f64], w: &[f64]) -> LineFit {
    debug_assert!(x.len() == y.len() && y.len() == w.len() && x.len() >= 3);
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        sxx += wi * (xi - xm).powi(2);
        sxy += wi * (xi - xm) * (yi - ym);
        syy += wi * (yi - ym).powi(2);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((&xi, &yi), &wi)| wi * (yi - intercept - slope * xi).powi(2))
        .sum();
    let dof = (x.len() - 2) as f64;
    let slope_stderr = (ssr / dof / sxx).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    LineFit { slope, intercept, slope_stderr, r_squared }
}
