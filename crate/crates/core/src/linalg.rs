//! Real symmetric tridiagonal matrices with an optional corner coupling
//! (periodic second-difference operators), and their lowest eigenpair.
//!
//! The lowest eigenvalue is located by bisection on Sylvester inertia counts
//! from an `LDLᵀ` factorisation, which stays `O(n)` with the corner fill-in
//! confined to the last column. The eigenvector follows from inverse iteration
//! with a shift just below the eigenvalue, where the shifted matrix is
//! positive definite.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    off: Vec<f64>,
    /// Couples rows `0` and `n - 1`.
    corner: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Unit 2-norm, sign chosen so the entries sum to a non-negative number.
    pub vector: Vec<f64>,
    /// `‖Av − λv‖₂`.
    pub residual: f64,
}

struct Factor {
    pivots: Vec<f64>,
    /// Coupling of each eliminated row to the last column.
    last_col: Vec<f64>,
}

impl CyclicTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>, corner: f64) -> Result<Self> {
        let n = diag.len();
        if n < 3 {
            return Err(Error::config("grid_points", format!("matrix dimension {n} < 3")));
        }
        if off.len() != n - 1 {
            return Err(Error::config("grid_points", "off-diagonal length must be n - 1"));
        }
        if diag.iter().chain(off.iter()).chain(std::iter::once(&corner)).any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite matrix entry".into()));
        }
        Ok(Self { diag, off, corner })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn corner(&self) -> f64 {
        self.corner
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y[0] += self.corner * x[n - 1];
        y[n - 1] += self.corner * x[0];
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for i in 0..n - 1 {
            m[(i, i + 1)] = self.off[i];
            m[(i + 1, i)] = self.off[i];
        }
        m[(0, n - 1)] += self.corner;
        m[(n - 1, 0)] += self.corner;
        m
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            if i == 0 || i == n - 1 {
                radius += self.corner.abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    fn factor(&self, shift: f64, tiny: f64) -> Factor {
        let n = self.dim();
        let guard = |p: f64| if p.abs() < tiny { -tiny } else { p };
        let mut pivots = vec![0.0; n];
        let mut last_col = vec![0.0; n - 1];
        pivots[0] = guard(self.diag[0] - shift);
        last_col[0] = self.corner;
        let mut acc_last = 0.0;
        for i in 1..n - 1 {
            let p_prev = pivots[i - 1];
            let f_prev = last_col[i - 1];
            acc_last += f_prev * f_prev / p_prev;
            let e = self.off[i - 1];
            pivots[i] = guard(self.diag[i] - shift - e * e / p_prev);
            let own = if i == n - 2 { self.off[n - 2] } else { 0.0 };
            last_col[i] = own - e * f_prev / p_prev;
        }
        let f_last = last_col[n - 2];
        acc_last += f_last * f_last / pivots[n - 2];
        pivots[n - 1] = guard(self.diag[n - 1] - shift - acc_last);
        Factor { pivots, last_col }
    }

    fn tiny(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0))
    }

    /// Number of eigenvalues strictly below `shift`.
    pub fn count_below(&self, shift: f64) -> usize {
        self.factor(shift, self.tiny()).pivots.iter().filter(|&&p| p < 0.0).count()
    }

    /// Solve `(A - shift·I) x = b`.
    pub fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let Factor { pivots, last_col } = self.factor(shift, self.tiny());
        let mut z = b.to_vec();
        for i in 1..n - 1 {
            z[i] -= self.off[i - 1] / pivots[i - 1] * z[i - 1];
        }
        for i in 0..n - 1 {
            z[n - 1] -= last_col[i] / pivots[i] * z[i];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = z[n - 1] / pivots[n - 1];
        x[n - 2] = (z[n - 2] - last_col[n - 2] * x[n - 1]) / pivots[n - 2];
        for i in (0..n - 2).rev() {
            x[i] = (z[i] - self.off[i] * x[i + 1] - last_col[i] * x[n - 1]) / pivots[i];
        }
        x
    }

    /// `k`-th smallest eigenvalue (0-based) by Sturm bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= f64::EPSILON * scale;
        hi += f64::EPSILON * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn lowest_eigenpair(&self) -> Result<Eigenpair> {
        let n = self.dim();
        let value = self.eigenvalue(0);
        let (lo, hi) = self.gershgorin();
        let norm_scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        // below the eigenvalue the shifted matrix is positive definite
        let shift = value - 1e-9 * norm_scale;
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut residual = f64::INFINITY;
        let mut value = value;
        for _ in 0..8 {
            let mut w = self.solve_shifted(shift, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Numerical(format!(
                    "inverse iteration broke down (norm {norm}) at shift {shift}"
                )));
            }
            w.iter_mut().for_each(|x| *x /= norm);
            v = w;
            let av = self.apply(&v);
            value = av.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>();
            residual = av.iter().zip(&v).map(|(a, x)| (a - value * x).powi(2)).sum::<f64>().sqrt();
            if residual <= 1e-12 * norm_scale {
                break;
            }
        }
        if residual > 1e-10 * norm_scale {
            return Err(Error::Numerical(format!(
                "eigenvector residual {residual:e} exceeds 1e-10 × ‖A‖ ({norm_scale:e}) for eigenvalue {value}"
            )));
        }
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(Eigenpair { value, vector: v, residual })
    }
}
