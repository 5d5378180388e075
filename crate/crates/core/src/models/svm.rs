use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::matrix::{dot, Matrix};
use crate::rng::rng;
use crate::stats::sigmoid;

/// Soft-margin linear SVM, `f(x) = w.x + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Dual variables, one per training row.
    pub alphas: Vec<f64>,
    pub converged: bool,
    pub epochs: usize,
}

/// A fit counts as converged once the projected dual gradients of an epoch
/// span less than this.
pub const KKT_TOL: f64 = 1e-4;

/// Spread at which the solver stops early.
const SOLVE_TOL: f64 = 1e-8;

impl LinearSvm {
    /// Dual coordinate descent on the hinge-loss dual
    ///
    /// ```text
    /// min 1/2 a'Qa - sum a,   0 <= a_i <= C_i
    /// ```
    ///
    /// with `t_i = +-1`, `Q_ij = t_i t_j z_i.z_j`, `z_i = [x_i, 1]` (the bias
    /// is the weight of a constant feature) and per-row bounds `C_i` (`C`
    /// times the row's class weight). Each epoch visits the rows in a fresh
    /// random order and solves each one-variable subproblem exactly. Runs
    /// until the largest and smallest projected gradients of an epoch differ
    /// by less than `1e-8`, or for `max_epochs`; `converged` reports whether
    /// the final spread is below [`KKT_TOL`].
    pub fn fit(x: &Matrix, y: &[u8], c_bounds: &[f64], max_epochs: usize, seed: u64) -> Self {
        let n = x.rows();
        let m = x.cols();
        let t: Vec<f64> = y.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();
        let qii: Vec<f64> = x.row_iter().map(|r| dot(r, r) + 1.0).collect();
        let mut alpha = vec![0.0; n];
        let mut w = vec![0.0; m];
        let mut b = 0.0;
        let mut order: Vec<usize> = (0..n).collect();
        let mut r = rng(seed);
        let mut spread = f64::INFINITY;
        let mut epochs = 0;
        while epochs < max_epochs {
            epochs += 1;
            order.shuffle(&mut r);
            let mut pg_max = f64::NEG_INFINITY;
            let mut pg_min = f64::INFINITY;
            for &i in &order {
                let row = x.row(i);
                let g = t[i] * (dot(&w, row) + b) - 1.0;
                let pg = if alpha[i] <= 0.0 {
                    g.min(0.0)
                } else if alpha[i] >= c_bounds[i] {
                    g.max(0.0)
                } else {
                    g
                };
                pg_max = pg_max.max(pg);
                pg_min = pg_min.min(pg);
                if pg != 0.0 {
                    let next = (alpha[i] - g / qii[i]).clamp(0.0, c_bounds[i]);
                    let d = (next - alpha[i]) * t[i];
                    alpha[i] = next;
                    for (wk, xk) in w.iter_mut().zip(row) {
                        *wk += d * xk;
                    }
                    b += d;
                }
            }
            spread = pg_max - pg_min;
            if spread < SOLVE_TOL {
                break;
            }
        }
        let converged = spread < KKT_TOL;
        if !converged {
            log::warn!("linear SVM: dual coordinate descent stopped after {max_epochs} epochs above tolerance");
        }
        Self {
            weights: w,
            bias: b,
            alphas: alpha,
            converged,
            epochs,
        }
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        dot(&self.weights, row) + self.bias
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        sigmoid(self.margin(row))
    }
}
