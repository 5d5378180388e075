//! Nine binary classifiers behind one contract.
//!
//! [`fit`] trains a [`TrainedModel`] from an [`EncodedMatrix`] and a
//! [`HyperParams`] map; [`TrainedModel::predict_score`] returns a score in
//! `[0, 1]` per row and [`TrainedModel::predict`] thresholds it at `0.5`.
//! Keys missing from the map take the values in [`default_params`].

mod adaboost;
mod boost;
mod forest;
mod knn;
mod linear;
mod logistic;
mod nb;
mod params;
mod svm;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adaboost::{weighted_median, AdaBoostR};
pub use boost::{Booster, BoosterConfig, GrowPolicy, Objective};
pub use forest::{sqrt_features, DecisionTree, ForestConfig, RandomForest};
pub use knn::{minkowski, Knn, KnnWeights};
pub use linear::LinearRegression;
pub use logistic::{fit_logistic, Logistic, LogisticObjective, Penalty};
pub use nb::GaussianNb;
pub use params::{param_names, validate, HyperParams, ParamValue};
pub use svm::{LinearSvm, KKT_TOL};
pub use tree::{CartParams, Criterion, Tree, TreeNode};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tabular::{class_counts, EncodedMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    XgboostLike,
    RandomForest,
    Knn,
    SvmLinear,
    AdaboostR,
    GaussianNb,
    Logistic,
    Linear,
    DecisionTree,
}

impl ModelKind {
    pub const ALL: [ModelKind; 9] = [
        ModelKind::XgboostLike,
        ModelKind::RandomForest,
        ModelKind::Knn,
        ModelKind::SvmLinear,
        ModelKind::AdaboostR,
        ModelKind::GaussianNb,
        ModelKind::Logistic,
        ModelKind::Linear,
        ModelKind::DecisionTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::XgboostLike => "xgboost_like",
            ModelKind::RandomForest => "random_forest",
            ModelKind::Knn => "knn",
            ModelKind::SvmLinear => "svm_linear",
            ModelKind::AdaboostR => "adaboost_r",
            ModelKind::GaussianNb => "gaussian_nb",
            ModelKind::Logistic => "logistic",
            ModelKind::Linear => "linear",
            ModelKind::DecisionTree => "decision_tree",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model kind `{s}`")))
    }
}

/// Untuned settings. Values fixed for a model are used
/// as is; every other grid parameter takes the element at index
/// `(len - 1) / 2` of its grid.
pub fn default_params(kind: ModelKind) -> HyperParams {
    let p = HyperParams::new();
    match kind {
        ModelKind::Linear => p.with("fit_intercept", true).with("copy_X", true),
        ModelKind::Logistic => p.with("penalty", "l2").with("C", 1.0).with("max_iter", 100),
        ModelKind::DecisionTree => p
            .with("criterion", "gini")
            .with("max_depth", 10)
            .with("min_samples_split", 5)
            .with("min_samples_leaf", 2),
        ModelKind::RandomForest => p
            .with("n_estimators", 100)
            .with("criterion", "gini")
            .with("max_depth", 10)
            .with("min_samples_split", 5)
            .with("min_samples_leaf", 2)
            .with("max_features", "sqrt")
            .with("bootstrap", true),
        ModelKind::AdaboostR => p.with("n_estimators", 100).with("learning_rate", 0.01),
        ModelKind::Knn => p.with("n_neighbors", 5).with("weights", "uniform").with("p", 1),
        ModelKind::GaussianNb => p.with("var_smoothing", 1e-8).with("priors", ParamValue::None),
        ModelKind::SvmLinear => p
            .with("C", 1.0)
            .with("gamma", 0.1)
            .with("class_weight", ParamValue::None)
            .with("max_iter", 1000),
        ModelKind::XgboostLike => p
            .with("n_estimators", 10)
            .with("max_depth", 5)
            .with("learning_rate", 0.1)
            .with("min_child_weight", 5)
            .with("alpha", 10.0)
            .with("lambda", 1.0)
            .with("gamma", 0.0)
            .with("colsample_bytree", 0.3)
            .with("objective", "binary:logistic")
            .with("grow_policy", "depthwise")
            .with("num_leaves", 31),
    }
}

/// Fitted state of one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelState {
    Booster(Booster),
    Forest(RandomForest),
    Knn(Knn),
    Svm(LinearSvm),
    AdaBoost(AdaBoostR),
    NaiveBayes(GaussianNb),
    Logistic(Logistic),
    Linear(LinearRegression),
    Tree(DecisionTree),
}

/// A fitted model together with the resolved parameters and feature names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub params: HyperParams,
    pub feature_names: Vec<String>,
    pub state: ModelState,
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// One score in `[0, 1]` per row.
    pub fn predict_score(&self, x: &Matrix) -> Result<Vec<f64>> {
        x.check_cols(self.n_features())?;
        let score = |row: &[f64]| match &self.state {
            ModelState::Booster(m) => m.score_row(row),
            ModelState::Forest(m) => m.score_row(row),
            ModelState::Knn(m) => m.score_row(row),
            ModelState::Svm(m) => m.score_row(row),
            ModelState::AdaBoost(m) => m.score_row(row),
            ModelState::NaiveBayes(m) => m.score_row(row),
            ModelState::Logistic(m) => m.score_row(row),
            ModelState::Linear(m) => m.score_row(row),
            ModelState::Tree(m) => m.score_row(row),
        };
        Ok(x.row_iter().map(score).collect())
    }

    /// Hard labels: `score >= 0.5`.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self.predict_score(x)?.into_iter().map(|s| u8::from(s >= 0.5)).collect())
    }

    /// Per-feature importances for the tree-based kinds.
    pub fn importances(&self) -> Option<&[f64]> {
        match &self.state {
            ModelState::Booster(m) => Some(&m.importances),
            ModelState::Forest(m) => Some(&m.importances),
            ModelState::Tree(m) => Some(&m.importances),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Trains `kind` on `matrix`. Deterministic for a fixed `seed`.
pub fn fit(kind: ModelKind, matrix: &EncodedMatrix, params: &HyperParams, seed: u64) -> Result<TrainedModel> {
    let state = fit_state(kind, &matrix.features, &matrix.target, params, seed)?;
    Ok(TrainedModel {
        kind,
        params: params.merged_over(&default_params(kind)),
        feature_names: matrix.feature_names.clone(),
        state,
    })
}

fn cart_params(p: &HyperParams, max_features: Option<usize>) -> Result<CartParams> {
    Ok(CartParams {
        criterion: Criterion::parse(p.choice("criterion", "gini"))?,
        max_depth: p.opt_usize("max_depth"),
        min_samples_split: p.usize("min_samples_split", 2),
        min_samples_leaf: p.usize("min_samples_leaf", 1),
        max_features,
    })
}

fn fit_state(kind: ModelKind, x: &Matrix, y: &[u8], params: &HyperParams, seed: u64) -> Result<ModelState> {
    validate(kind, params)?;
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch(x.rows(), y.len()));
    }
    let (neg, pos) = class_counts(y);
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let p = params.merged_over(&default_params(kind));
    let n = y.len();
    let m = x.cols();
    let target: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    Ok(match kind {
        ModelKind::DecisionTree => ModelState::Tree(DecisionTree::fit(x, y, &cart_params(&p, None)?, seed)),
        ModelKind::RandomForest => {
            let max_features = match p.choice("max_features", "sqrt") {
                "all" => None,
                _ => Some(sqrt_features(m)),
            };
            let cfg = ForestConfig {
                n_estimators: p.usize("n_estimators", 100),
                tree: cart_params(&p, max_features)?,
                bootstrap: p.flag("bootstrap", true),
            };
            ModelState::Forest(RandomForest::fit(x, y, &cfg, seed))
        }
        ModelKind::XgboostLike => {
            let cfg = BoosterConfig {
                n_estimators: p.usize("n_estimators", 10),
                max_depth: p.opt_usize("max_depth"),
                num_leaves: p.usize("num_leaves", 31),
                grow_policy: match p.choice("grow_policy", "depthwise") {
                    "lossguide" => GrowPolicy::Lossguide,
                    _ => GrowPolicy::Depthwise,
                },
                learning_rate: p.float("learning_rate", 0.1),
                min_child_weight: p.float("min_child_weight", 1.0),
                alpha: p.float("alpha", 0.0),
                lambda: p.float("lambda", 1.0),
                gamma: p.float("gamma", 0.0),
                colsample_bytree: p.float("colsample_bytree", 1.0),
                objective: match p.choice("objective", "binary:logistic") {
                    "reg:squarederror" => Objective::SquaredError,
                    _ => Objective::Logistic,
                },
            };
            ModelState::Booster(Booster::fit(x, y, &cfg, seed))
        }
        ModelKind::Knn => {
            let k = p.usize("n_neighbors", 5);
            if k > n {
                return Err(Error::param(
                    "n_neighbors",
                    k,
                    &format!("at most the {n} training rows"),
                ));
            }
            ModelState::Knn(Knn {
                x: x.clone(),
                y: y.to_vec(),
                k,
                weights: match p.choice("weights", "uniform") {
                    "distance" => KnnWeights::Distance,
                    _ => KnnWeights::Uniform,
                },
                p: p.usize("p", 2) as u8,
            })
        }
        ModelKind::SvmLinear => {
            let c = p.float("C", 1.0);
            let balanced = p.choice("class_weight", "") == "balanced";
            let bounds: Vec<f64> = y
                .iter()
                .map(|&v| {
                    let count = if v == 1 { pos } else { neg };
                    if balanced {
                        c * n as f64 / (2.0 * count as f64)
                    } else {
                        c
                    }
                })
                .collect();
            ModelState::Svm(LinearSvm::fit(x, y, &bounds, p.usize("max_iter", 1000), seed))
        }
        ModelKind::AdaboostR => ModelState::AdaBoost(AdaBoostR::fit(
            x,
            y,
            p.usize("n_estimators", 50),
            p.float("learning_rate", 1.0),
        )),
        ModelKind::GaussianNb => {
            let priors = match p.get("priors") {
                Some(ParamValue::FloatList(v)) => Some([v[0], v[1]]),
                _ => None,
            };
            ModelState::NaiveBayes(GaussianNb::fit(x, y, p.float("var_smoothing", 1e-9), priors))
        }
        ModelKind::Logistic => {
            let penalty = match p.choice("penalty", "l2") {
                "l1" => Penalty::L1,
                _ => Penalty::L2,
            };
            let max_iter = match penalty {
                Penalty::L2 => p.usize("max_iter", 100),
                // Proximal iterations are far cheaper than Newton steps.
                Penalty::L1 => p.usize("max_iter", 100) * 200,
            };
            ModelState::Logistic(fit_logistic(x, &target, penalty, 1.0 / p.float("C", 1.0), max_iter))
        }
        ModelKind::Linear => ModelState::Linear(LinearRegression::fit(x, &target, p.flag("fit_intercept", true))),
    })
}

#[cfg(test)]
mod tests;
