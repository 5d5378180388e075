use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::stats::{mean, sigmoid, variance};

/// Gaussian naive Bayes for two classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    /// Per class (index = label), per feature.
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub priors: [f64; 2],
    /// Variance added to every class variance: `var_smoothing * max_j var(X_j)`.
    pub epsilon: f64,
}

const LN_2PI: f64 = 1.837_877_066_409_345_3;

impl GaussianNb {
    /// `priors = None` uses the empirical class frequencies.
    pub fn fit(x: &Matrix, y: &[u8], var_smoothing: f64, priors: Option<[f64; 2]>) -> Self {
        let m = x.cols();
        let max_var = (0..m).map(|j| variance(&x.column(j))).fold(0.0, f64::max);
        let epsilon = var_smoothing * max_var;
        let mut means: [Vec<f64>; 2] = Default::default();
        let mut variances: [Vec<f64>; 2] = Default::default();
        let mut counts = [0usize; 2];
        for c in 0..2u8 {
            let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
            counts[c as usize] = rows.len();
            for j in 0..m {
                let col: Vec<f64> = rows.iter().map(|&i| x.get(i, j)).collect();
                means[c as usize].push(if col.is_empty() { 0.0 } else { mean(&col) });
                let v = if col.is_empty() { 0.0 } else { variance(&col) };
                variances[c as usize].push(v + epsilon);
            }
        }
        let n = y.len().max(1) as f64;
        let priors = priors.unwrap_or([counts[0] as f64 / n, counts[1] as f64 / n]);
        Self {
            means,
            variances,
            priors,
            epsilon,
        }
    }

    /// `ln P(c) + ln p(x | c)`.
    pub fn joint_log_likelihood(&self, row: &[f64], class: usize) -> f64 {
        let mut ll = self.priors[class].ln();
        for ((x, mu), var) in row.iter().zip(&self.means[class]).zip(&self.variances[class]) {
            let var = var.max(f64::MIN_POSITIVE);
            ll -= 0.5 * (LN_2PI + var.ln() + (x - mu) * (x - mu) / var);
        }
        ll
    }

    /// Posterior `P(1 | x)`.
    pub fn score_row(&self, row: &[f64]) -> f64 {
        let l0 = self.joint_log_likelihood(row, 0);
        let l1 = self.joint_log_likelihood(row, 1);
        if l1 == f64::NEG_INFINITY {
            0.0
        } else if l0 == f64::NEG_INFINITY {
            1.0
        } else {
            sigmoid(l1 - l0)
        }
    }
}
