use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng;

/// Assignment of every row to one of `k` folds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    /// False when stratification was requested but downgraded.
    pub stratified: bool,
    pub seed: u64,
}

impl FoldPlan {
    pub fn n_rows(&self) -> usize {
        self.assignments.len()
    }

    /// `(train, validation)` row indices for `fold`, each ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut val = Vec::new();
        for (i, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                val.push(i);
            } else {
                train.push(i);
            }
        }
        (train, val)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Deterministic k-fold plan.
///
/// Rows are shuffled with `seed` and dealt round-robin into folds. When
/// `stratified`, the shuffled negatives are dealt first and the shuffled
/// positives continue the same rotation, so both fold sizes and per-fold
/// positive counts differ by at most one. A class with fewer than `k` rows
/// downgrades the plan to plain folds, with a warning.
pub fn kfold_plan(target: &[u8], k: usize, stratified: bool, seed: u64) -> Result<FoldPlan> {
    let n = target.len();
    if k < 2 {
        return Err(Error::InvalidConfig(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::KTooLarge { k, n });
    }
    crate::tabular::check_binary(target)?;
    let mut r = rng(seed);
    let mut use_strata = stratified;
    let (neg, pos) = crate::tabular::class_counts(target);
    if stratified && (neg < k || pos < k) {
        log::warn!("stratified {k}-fold requested but class sizes are {neg}/{pos}; using plain folds");
        use_strata = false;
    }
    let order: Vec<usize> = if use_strata {
        let mut zeros: Vec<usize> = (0..n).filter(|&i| target[i] == 0).collect();
        let mut ones: Vec<usize> = (0..n).filter(|&i| target[i] == 1).collect();
        zeros.shuffle(&mut r);
        ones.shuffle(&mut r);
        zeros.into_iter().chain(ones).collect()
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut r);
        all
    };
    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan {
        k,
        assignments,
        stratified: use_strata,
        seed,
    })
}
