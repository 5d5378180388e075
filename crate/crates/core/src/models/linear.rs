use serde::{Deserialize, Serialize};

use crate::matrix::{cholesky_solve, dot, Matrix};

const JITTER: f64 = 1e-10;

/// Ordinary least squares on 0/1 targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearRegression {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl LinearRegression {
    /// Solves the normal equations `(X'X + 1e-10 I) beta = X'y`, with a
    /// leading column of ones when `fit_intercept` is set.
    pub fn fit(x: &Matrix, y: &[f64], fit_intercept: bool) -> Self {
        let m = x.cols();
        let off = usize::from(fit_intercept);
        let d = m + off;
        let mut a = vec![0.0; d * d];
        let mut b = vec![0.0; d];
        let mut z = vec![0.0; d];
        for (row, &t) in x.row_iter().zip(y) {
            if fit_intercept {
                z[0] = 1.0;
            }
            z[off..].copy_from_slice(row);
            for i in 0..d {
                b[i] += z[i] * t;
                for j in 0..=i {
                    a[i * d + j] += z[i] * z[j];
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                a[j * d + i] = a[i * d + j];
            }
            a[i * d + i] += JITTER;
        }
        let beta = cholesky_solve(&a, &b, d).unwrap_or_else(|| {
            log::warn!("normal equations not positive definite; falling back to zero coefficients");
            vec![0.0; d]
        });
        Self {
            intercept: if fit_intercept { beta[0] } else { 0.0 },
            coefficients: beta[off..].to_vec(),
        }
    }

    /// Unclamped regression output.
    pub fn raw(&self, row: &[f64]) -> f64 {
        dot(&self.coefficients, row) + self.intercept
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        self.raw(row).clamp(0.0, 1.0)
    }
}
