use serde::{Deserialize, Serialize};

use super::{median_rule, SelectorKind, SelectorVerdict};
use crate::error::{Error, Result};
use crate::models::{
    fit_logistic, sqrt_features, Booster, BoosterConfig, CartParams, ForestConfig, GrowPolicy, Objective, Penalty,
    RandomForest,
};
use crate::stats::standardize;
use crate::tabular::{class_counts, EncodedMatrix};

fn require_both_classes(matrix: &EncodedMatrix) -> Result<()> {
    let (neg, pos) = class_counts(&matrix.target);
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    Ok(())
}

fn target(matrix: &EncodedMatrix) -> Vec<f64> {
    matrix.target.iter().map(|&v| f64::from(v)).collect()
}

/// Penalty weight of the internal ranking estimator (an L2 logistic
/// regression with `C = 1`).
const RANKER_STRENGTH: f64 = 1.0;

/// Recursive feature elimination. Each round fits the ranking estimator on
/// the surviving standardized features and drops the `min(step, left -
/// n_keep)` with the smallest `|w|`. Scores are ranks: 1 for survivors,
/// higher for earlier eliminations.
pub fn select_rfe(matrix: &EncodedMatrix, n_keep: usize, step: usize) -> Result<SelectorVerdict> {
    let m = matrix.n_features();
    if n_keep > m {
        return Err(Error::NKeepTooLarge { n_keep, features: m });
    }
    if n_keep == 0 || step == 0 {
        return Err(Error::InvalidConfig("RFE needs n_keep >= 1 and step >= 1".into()));
    }
    require_both_classes(matrix)?;
    let x = standardize(&matrix.features);
    let y = target(matrix);
    let mut alive: Vec<usize> = (0..m).collect();
    let mut eliminated_in_round: Vec<Option<usize>> = vec![None; m];
    let mut round = 0;
    while alive.len() > n_keep {
        let fit = fit_logistic(&x.select_columns(&alive), &y, Penalty::L2, RANKER_STRENGTH, 100);
        let mut order: Vec<usize> = (0..alive.len()).collect();
        order.sort_by(|&a, &b| fit.coefficients[a].abs().total_cmp(&fit.coefficients[b].abs()));
        let drop = step.min(alive.len() - n_keep);
        let mut dropped: Vec<usize> = order[..drop].iter().map(|&p| alive[p]).collect();
        dropped.sort_unstable();
        for &f in &dropped {
            eliminated_in_round[f] = Some(round);
        }
        alive.retain(|f| !dropped.contains(f));
        round += 1;
    }
    let scores = eliminated_in_round
        .iter()
        .map(|r| match r {
            None => 1.0,
            Some(r) => (round - r + 1) as f64,
        })
        .collect();
    let selected = eliminated_in_round.iter().map(Option::is_none).collect();
    Ok(SelectorVerdict::new(SelectorKind::Rfe, matrix, selected, scores))
}

/// L1-penalized logistic regression on standardized features, minimizing
/// summed log loss plus `lambda * |w|_1`. Keeps features whose `|w|` is
/// non-zero and at least `multiplier` times the median `|w|`.
pub fn select_l1_logistic(matrix: &EncodedMatrix, lambda: f64, multiplier: f64) -> Result<SelectorVerdict> {
    require_both_classes(matrix)?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let x = standardize(&matrix.features);
    let fit = fit_logistic(&x, &target(matrix), Penalty::L1, lambda, 50_000);
    let scores: Vec<f64> = fit.coefficients.iter().map(|w| w.abs()).collect();
    let selected = median_rule(&scores, multiplier);
    let mut v = SelectorVerdict::new(SelectorKind::L1Logistic, matrix, selected, scores);
    v.converged = fit.converged;
    Ok(v)
}

/// Random-forest impurity importances (fully grown trees, `sqrt(m)`
/// features per split), kept at `multiplier` times the median.
pub fn select_rf_importance(
    matrix: &EncodedMatrix,
    n_estimators: usize,
    multiplier: f64,
    seed: u64,
) -> Result<SelectorVerdict> {
    require_both_classes(matrix)?;
    if matrix.n_rows() < 2 || n_estimators == 0 {
        return Err(Error::InvalidConfig(
            "random forest selector needs n >= 2 and at least one tree".into(),
        ));
    }
    let cfg = ForestConfig {
        n_estimators,
        tree: CartParams {
            max_features: Some(sqrt_features(matrix.n_features())),
            ..CartParams::default()
        },
        bootstrap: true,
    };
    let forest = RandomForest::fit(&matrix.features, &matrix.target, &cfg, seed);
    let scores = forest.importances;
    let selected = median_rule(&scores, multiplier);
    Ok(SelectorVerdict::new(
        SelectorKind::RfImportance,
        matrix,
        selected,
        scores,
    ))
}

/// Leaf-wise gradient boosting used by the importance selector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbmSelectorConfig {
    pub num_leaves: usize,
    /// Boosting rounds.
    pub min_estimators: usize,
    pub learning_rate: f64,
    pub colsample_bytree: f64,
    pub reg_alpha: f64,
    pub reg_lambda: f64,
    pub min_child_weight: f64,
}

impl Default for GbmSelectorConfig {
    fn default() -> Self {
        Self {
            num_leaves: 32,
            min_estimators: 500,
            learning_rate: 0.05,
            colsample_bytree: 0.2,
            reg_alpha: 3.0,
            reg_lambda: 1.0,
            min_child_weight: 40.0,
        }
    }
}

impl GbmSelectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_estimators == 0 {
            return Err(Error::InvalidConfig(
                "gbm selector needs at least one boosting round".into(),
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(
                "gbm selector learning_rate must be positive".into(),
            ));
        }
        if self.num_leaves < 2 {
            return Err(Error::InvalidConfig(
                "gbm selector num_leaves must be at least 2".into(),
            ));
        }
        if !(self.colsample_bytree > 0.0 && self.colsample_bytree <= 1.0) {
            return Err(Error::InvalidConfig(
                "gbm selector colsample_bytree must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Split-gain importances of a leaf-wise boosted ensemble, kept at
/// `multiplier` times the median.
pub fn select_gbm_importance(
    matrix: &EncodedMatrix,
    cfg: &GbmSelectorConfig,
    multiplier: f64,
    seed: u64,
) -> Result<SelectorVerdict> {
    cfg.validate()?;
    require_both_classes(matrix)?;
    let booster = Booster::fit(
        &matrix.features,
        &matrix.target,
        &BoosterConfig {
            n_estimators: cfg.min_estimators,
            max_depth: None,
            num_leaves: cfg.num_leaves,
            grow_policy: GrowPolicy::Lossguide,
            learning_rate: cfg.learning_rate,
            min_child_weight: cfg.min_child_weight,
            alpha: cfg.reg_alpha,
            lambda: cfg.reg_lambda,
            gamma: 0.0,
            colsample_bytree: cfg.colsample_bytree,
            objective: Objective::Logistic,
        },
        seed,
    );
    let scores = booster.importances;
    let selected = median_rule(&scores, multiplier);
    Ok(SelectorVerdict::new(
        SelectorKind::GbmImportance,
        matrix,
        selected,
        scores,
    ))
}
