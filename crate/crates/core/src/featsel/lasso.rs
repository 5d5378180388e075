use super::{SelectorKind, SelectorVerdict};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::stats::{soft_threshold, standardize};
use crate::tabular::EncodedMatrix;

/// Solution of a LASSO problem.
#[derive(Clone, Debug, PartialEq)]
pub struct LassoFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub converged: bool,
    pub sweeps: usize,
}

/// Cyclic coordinate descent on
///
/// ```text
/// (1 / 2n) |y - b - Xw|^2 + alpha |w|_1
/// ```
///
/// The intercept `b` is unpenalized and handled by centering. Stops when no
/// coefficient moves by more than `tol` in a full sweep.
pub fn lasso_coordinate_descent(x: &Matrix, y: &[f64], alpha: f64, tol: f64, max_sweeps: usize) -> LassoFit {
    let n = x.rows();
    let m = x.cols();
    let nf = n.max(1) as f64;
    let col_means: Vec<f64> = (0..m).map(|j| x.column(j).iter().sum::<f64>() / nf).collect();
    let y_mean = y.iter().sum::<f64>() / nf;
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|j| x.column(j).iter().map(|v| v - col_means[j]).collect())
        .collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf).collect();
    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut w = vec![0.0; m];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_step: f64 = 0.0;
        for j in 0..m {
            if norms[j] <= 0.0 {
                continue;
            }
            let rho = cols[j].iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / nf + norms[j] * w[j];
            let new = soft_threshold(rho, alpha) / norms[j];
            let delta = new - w[j];
            if delta != 0.0 {
                for (r, a) in resid.iter_mut().zip(&cols[j]) {
                    *r -= a * delta;
                }
                w[j] = new;
                max_step = max_step.max(delta.abs());
            }
        }
        if max_step <= tol {
            converged = true;
            break;
        }
    }
    let intercept = y_mean - w.iter().zip(&col_means).map(|(a, b)| a * b).sum::<f64>();
    LassoFit {
        coefficients: w,
        intercept,
        converged,
        sweeps,
    }
}

/// LASSO on standardized features with the 0/1 target as a real response.
/// Keeps features with `|w| > 1e-12`; scores are `|w|`.
pub fn select_lasso(matrix: &EncodedMatrix, alpha: f64) -> Result<SelectorVerdict> {
    let x = standardize(&matrix.features);
    let y: Vec<f64> = matrix.target.iter().map(|&v| f64::from(v)).collect();
    let fit = lasso_coordinate_descent(&x, &y, alpha, 1e-8, 100_000);
    if !fit.converged {
        log::warn!("lasso selector: coordinate descent hit its sweep cap");
    }
    let scores: Vec<f64> = fit.coefficients.iter().map(|w| w.abs()).collect();
    let selected = scores.iter().map(|&s| s > 1e-12).collect();
    let mut v = SelectorVerdict::new(SelectorKind::Lasso, matrix, selected, scores);
    v.converged = fit.converged;
    Ok(v)
}
