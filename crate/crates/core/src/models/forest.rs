use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::tree::{grow_classifier, CartParams, Presorted, Tree};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng, stream};

/// A single CART classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub tree: Tree,
    /// Impurity decrease per feature, normalized to sum to one.
    pub importances: Vec<f64>,
}

impl DecisionTree {
    pub fn fit(x: &Matrix, y: &[u8], params: &CartParams, seed: u64) -> Self {
        let target: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let data = Presorted::new(x);
        let mut imp = vec![0.0; x.cols()];
        let tree = grow_classifier(&data, &target, &vec![1.0; y.len()], params, &mut rng(seed), &mut imp);
        normalize(&mut imp);
        Self { tree, importances: imp }
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        self.tree.predict_row(row)
    }
}

/// Scales to sum one; an all-zero vector is left as is.
pub(crate) fn normalize(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        for x in v {
            *x /= total;
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub tree: CartParams,
    pub bootstrap: bool,
}

/// Bagged CART ensemble; the score is the mean of the trees' leaf fractions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<Tree>,
    /// Mean of per-tree normalized impurity decreases, renormalized.
    pub importances: Vec<f64>,
}

impl RandomForest {
    /// Tree `t` draws its bootstrap counts and feature subsets from
    /// `derive_seed(seed, TREE, t)`.
    pub fn fit(x: &Matrix, y: &[u8], cfg: &ForestConfig, seed: u64) -> Self {
        let n = y.len();
        let m = x.cols();
        let target: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let data = Presorted::new(x);
        let mut trees = Vec::with_capacity(cfg.n_estimators);
        let mut importances = vec![0.0; m];
        let mut weights = vec![0.0; n];
        for t in 0..cfg.n_estimators {
            let mut r = rng(derive_seed(seed, stream::TREE, t as u64));
            if cfg.bootstrap {
                weights.iter_mut().for_each(|w| *w = 0.0);
                for _ in 0..n {
                    weights[r.random_range(0..n)] += 1.0;
                }
            } else {
                weights.iter_mut().for_each(|w| *w = 1.0);
            }
            let mut imp = vec![0.0; m];
            trees.push(grow_classifier(&data, &target, &weights, &cfg.tree, &mut r, &mut imp));
            normalize(&mut imp);
            for (acc, v) in importances.iter_mut().zip(&imp) {
                *acc += v;
            }
        }
        normalize(&mut importances);
        Self { trees, importances }
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len().max(1) as f64
    }
}

/// `max(1, floor(sqrt(m)))`.
pub fn sqrt_features(m: usize) -> usize {
    ((m as f64).sqrt().floor() as usize).max(1)
}
