use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::tree::{grow_boost_tree, BoostTreeParams, Presorted, Tree};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng, stream};
use crate::stats::{sigmoid, softplus};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    #[default]
    #[serde(rename = "binary:logistic")]
    Logistic,
    #[serde(rename = "reg:squarederror")]
    SquaredError,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowPolicy {
    /// Level by level up to `max_depth`.
    Depthwise,
    /// Best-first up to `num_leaves` leaves.
    Lossguide,
}

#[derive(Clone, Copy, Debug)]
pub struct BoosterConfig {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub num_leaves: usize,
    pub grow_policy: GrowPolicy,
    pub learning_rate: f64,
    pub min_child_weight: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub colsample_bytree: f64,
    pub objective: Objective,
}

/// Gradient-boosted regression trees on a second-order loss expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Booster {
    pub objective: Objective,
    /// Initial margin: log-odds of the base rate, or the mean target.
    pub base_margin: f64,
    pub trees: Vec<Tree>,
    /// Total split gain per feature, normalized to sum to one.
    pub importances: Vec<f64>,
    /// Mean training loss before any tree and after each round.
    pub loss_trace: Vec<f64>,
}

fn mean_loss(objective: Objective, margin: &[f64], y: &[f64]) -> f64 {
    let n = y.len().max(1) as f64;
    match objective {
        Objective::Logistic => margin.iter().zip(y).map(|(&f, &t)| softplus(f) - t * f).sum::<f64>() / n,
        Objective::SquaredError => {
            margin
                .iter()
                .zip(y)
                .map(|(&f, &t)| 0.5 * (f - t) * (f - t))
                .sum::<f64>()
                / n
        }
    }
}

impl Booster {
    pub fn fit(x: &Matrix, y: &[u8], cfg: &BoosterConfig, seed: u64) -> Self {
        let n = y.len();
        let m = x.cols();
        let target: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let rate = target.iter().sum::<f64>() / n.max(1) as f64;
        let base_margin = match cfg.objective {
            Objective::Logistic => {
                let p = rate.clamp(1e-12, 1.0 - 1e-12);
                (p / (1.0 - p)).ln()
            }
            Objective::SquaredError => rate,
        };
        let data = Presorted::new(x);
        let tree_params = BoostTreeParams {
            max_depth: cfg.max_depth,
            max_leaves: match cfg.grow_policy {
                GrowPolicy::Depthwise => None,
                GrowPolicy::Lossguide => Some(cfg.num_leaves),
            },
            min_child_weight: cfg.min_child_weight,
            lambda: cfg.lambda,
            alpha: cfg.alpha,
            gamma: cfg.gamma,
            learning_rate: cfg.learning_rate,
        };
        let n_cols = ((cfg.colsample_bytree * m as f64).floor() as usize).clamp(1.min(m), m);
        let mut margin = vec![base_margin; n];
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        let mut gains = vec![0.0; m];
        let mut trees = Vec::with_capacity(cfg.n_estimators);
        let mut loss_trace = vec![mean_loss(cfg.objective, &margin, &target)];
        for round in 0..cfg.n_estimators {
            for i in 0..n {
                match cfg.objective {
                    Objective::Logistic => {
                        let p = sigmoid(margin[i]);
                        grad[i] = p - target[i];
                        hess[i] = p * (1.0 - p);
                    }
                    Objective::SquaredError => {
                        grad[i] = margin[i] - target[i];
                        hess[i] = 1.0;
                    }
                }
            }
            let features: Vec<usize> = if n_cols < m {
                let mut r = rng(derive_seed(seed, stream::TREE, round as u64));
                let mut f = sample(&mut r, m, n_cols).into_vec();
                f.sort_unstable();
                f
            } else {
                (0..m).collect()
            };
            let tree = grow_boost_tree(&data, &features, &grad, &hess, &tree_params, &mut gains);
            for (i, row) in x.row_iter().enumerate() {
                margin[i] += tree.predict_row(row);
            }
            trees.push(tree);
            loss_trace.push(mean_loss(cfg.objective, &margin, &target));
        }
        let total: f64 = gains.iter().sum();
        let importances = if total > 0.0 {
            gains.iter().map(|g| g / total).collect()
        } else {
            vec![0.0; m]
        };
        Self {
            objective: cfg.objective,
            base_margin,
            trees,
            importances,
            loss_trace,
        }
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        self.base_margin + self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        match self.objective {
            Objective::Logistic => sigmoid(self.margin(row)),
            Objective::SquaredError => self.margin(row).clamp(0.0, 1.0),
        }
    }
}
