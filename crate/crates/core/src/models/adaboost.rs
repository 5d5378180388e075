use serde::{Deserialize, Serialize};

use super::tree::{grow_classifier, CartParams, Presorted, Tree};
use crate::matrix::Matrix;

/// AdaBoost.R2 with linear loss over depth-1 regression stumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostR {
    pub stumps: Vec<Tree>,
    /// `learning_rate * ln(1 / beta)` per stump.
    pub stump_weights: Vec<f64>,
}

pub(crate) struct AdaTrace {
    pub weight_sums: Vec<f64>,
}

impl AdaBoostR {
    pub fn fit(x: &Matrix, y: &[u8], n_estimators: usize, learning_rate: f64) -> Self {
        Self::fit_traced(x, y, n_estimators, learning_rate).0
    }

    pub(crate) fn fit_traced(x: &Matrix, y: &[u8], n_estimators: usize, learning_rate: f64) -> (Self, AdaTrace) {
        let n = y.len();
        let target: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let data = Presorted::new(x);
        let stump = CartParams {
            max_depth: Some(1),
            ..CartParams::default()
        };
        let mut sample_w = vec![1.0 / n as f64; n];
        let mut model = Self {
            stumps: Vec::new(),
            stump_weights: Vec::new(),
        };
        let mut trace = AdaTrace {
            weight_sums: vec![sample_w.iter().sum()],
        };
        // Stumps over all features consume no randomness.
        let mut unused_rng = crate::rng::rng(0);
        let mut scratch = vec![0.0; x.cols()];
        for _ in 0..n_estimators {
            let tree = grow_classifier(&data, &target, &sample_w, &stump, &mut unused_rng, &mut scratch);
            let err: Vec<f64> = x
                .row_iter()
                .zip(&target)
                .map(|(row, t)| (tree.predict_row(row) - t).abs())
                .collect();
            let max_err = err.iter().copied().fold(0.0, f64::max);
            if max_err <= 0.0 {
                model.stumps.push(tree);
                model.stump_weights.push(1.0);
                break;
            }
            let avg_loss: f64 = err.iter().zip(&sample_w).map(|(e, w)| w * e / max_err).sum();
            if avg_loss >= 0.5 {
                if model.stumps.is_empty() {
                    model.stumps.push(tree);
                    model.stump_weights.push(1.0);
                }
                break;
            }
            let beta = avg_loss / (1.0 - avg_loss);
            model.stumps.push(tree);
            model.stump_weights.push(learning_rate * (1.0 / beta).ln());
            for (w, e) in sample_w.iter_mut().zip(&err) {
                *w *= beta.powf((1.0 - e / max_err) * learning_rate);
            }
            let total: f64 = sample_w.iter().sum();
            for w in &mut sample_w {
                *w /= total;
            }
            trace.weight_sums.push(sample_w.iter().sum());
        }
        (model, trace)
    }

    /// Weighted median of the stump outputs: the smallest output whose
    /// cumulative weight reaches half the total.
    pub fn regress(&self, row: &[f64]) -> f64 {
        let mut preds: Vec<(f64, f64)> = self
            .stumps
            .iter()
            .zip(&self.stump_weights)
            .map(|(s, &w)| (s.predict_row(row), w))
            .collect();
        weighted_median(&mut preds)
    }

    /// Weighted mean of the stump outputs, clamped to `[0, 1]`.
    pub fn score_row(&self, row: &[f64]) -> f64 {
        let total: f64 = self.stump_weights.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        let s: f64 = self
            .stumps
            .iter()
            .zip(&self.stump_weights)
            .map(|(t, w)| w * t.predict_row(row))
            .sum();
        (s / total).clamp(0.0, 1.0)
    }
}

/// `(value, weight)` pairs; sorts in place by value (stable).
pub fn weighted_median(pairs: &mut [(f64, f64)]) -> f64 {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut acc = 0.0;
    for &(v, w) in pairs.iter() {
        acc += w;
        if acc >= 0.5 * total {
            return v;
        }
    }
    pairs.last().map_or(0.0, |p| p.0)
}
