use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::folds::FoldPlan;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::models::{fit, HyperParams, ModelKind, TrainedModel};
use crate::rng::{derive_seed, stream};
use crate::tabular::{oversample_minority, EncodedMatrix};

/// Anything that scores rows; `predict` thresholds the score at `0.5`.
pub trait Predictor {
    fn predict_score(&self, x: &Matrix) -> Result<Vec<f64>>;

    fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self.predict_score(x)?.into_iter().map(|s| u8::from(s >= 0.5)).collect())
    }
}

impl Predictor for TrainedModel {
    fn predict_score(&self, x: &Matrix) -> Result<Vec<f64>> {
        TrainedModel::predict_score(self, x)
    }
}

/// A recipe that turns training data into a [`Predictor`].
pub trait Estimator {
    fn fit(&self, data: &EncodedMatrix, seed: u64) -> Result<Box<dyn Predictor>>;
}

/// A model kind with its hyper-parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: HyperParams,
}

impl Estimator for ModelSpec {
    fn fit(&self, data: &EncodedMatrix, seed: u64) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(fit(self.kind, data, &self.params, seed)?))
    }
}

/// Where minority oversampling happens relative to evaluation data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMode {
    /// Only training data (training folds, the final training set) is
    /// oversampled; validation folds and the test set never are.
    #[default]
    #[serde(alias = "fold-safe")]
    FoldSafe,
    /// The whole matrix is oversampled before the train/test split. Leaks
    /// duplicated minority rows into evaluation data.
    #[serde(alias = "pre-split")]
    PreSplit,
    None,
}

impl ResampleMode {
    pub const ALL: [ResampleMode; 3] = [ResampleMode::FoldSafe, ResampleMode::PreSplit, ResampleMode::None];

    pub fn name(self) -> &'static str {
        match self {
            ResampleMode::FoldSafe => "fold_safe",
            ResampleMode::PreSplit => "pre_split",
            ResampleMode::None => "none",
        }
    }
}

impl fmt::Display for ResampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ResampleMode {
    type Err = Error;

    /// Accepts `fold_safe` or `fold-safe`, `pre_split` or `pre-split`, `none`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        ResampleMode::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown resample mode `{s}`")))
    }
}

/// Per-fold validation accuracy and their mean over successful folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    /// `None` for a fold whose fit or prediction failed.
    pub fold_accuracies: Vec<Option<f64>>,
    pub mean: f64,
    /// `(fold, error message)` for each failed fold.
    pub failures: Vec<(usize, String)>,
}

fn accuracy(y: &[u8], pred: &[u8]) -> f64 {
    let hits = y.iter().zip(pred).filter(|(a, b)| a == b).count();
    hits as f64 / y.len().max(1) as f64
}

fn run_fold(
    est: &dyn Estimator,
    data: &EncodedMatrix,
    plan: &FoldPlan,
    mode: ResampleMode,
    seed: u64,
    fold: usize,
) -> Result<f64> {
    let (train_idx, val_idx) = plan.split(fold);
    let mut train = data.select_rows(&train_idx);
    if mode == ResampleMode::FoldSafe {
        let (x, y) = oversample_minority(
            &train.features,
            &train.target,
            derive_seed(seed, stream::RESAMPLE, fold as u64),
        )?;
        train.features = x;
        train.target = y;
    }
    let model = est.fit(&train, derive_seed(seed, stream::FOLD_FIT, fold as u64))?;
    let val = data.select_rows(&val_idx);
    Ok(accuracy(&val.target, &model.predict(&val.features)?))
}

/// Mean validation accuracy over the folds of `plan`.
///
/// Under [`ResampleMode::FoldSafe`] each training fold is oversampled with
/// `derive_seed(seed, RESAMPLE, fold)`; the fit on fold `f` uses
/// `derive_seed(seed, FOLD_FIT, f)`. Failed folds are recorded and
/// excluded from the mean; if every fold fails the last error is returned.
pub fn cross_val_accuracy(
    est: &dyn Estimator,
    data: &EncodedMatrix,
    plan: &FoldPlan,
    mode: ResampleMode,
    seed: u64,
) -> Result<CvResult> {
    if plan.n_rows() != data.n_rows() {
        return Err(Error::LengthMismatch(plan.n_rows(), data.n_rows()));
    }
    let mut fold_accuracies = Vec::with_capacity(plan.k);
    let mut failures = Vec::new();
    let mut last_err = None;
    for fold in 0..plan.k {
        match run_fold(est, data, plan, mode, seed, fold) {
            Ok(a) => fold_accuracies.push(Some(a)),
            Err(e) => {
                log::warn!("fold {fold} failed: {e}");
                failures.push((fold, e.to_string()));
                fold_accuracies.push(None);
                last_err = Some(e);
            }
        }
    }
    let ok: Vec<f64> = fold_accuracies.iter().flatten().copied().collect();
    if ok.is_empty() {
        return Err(last_err.unwrap_or(Error::EmptyMatrix));
    }
    let mean = ok.iter().sum::<f64>() / ok.len() as f64;
    Ok(CvResult {
        fold_accuracies,
        mean,
        failures,
    })
}
