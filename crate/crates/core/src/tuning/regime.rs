use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cv::{cross_val_accuracy, CvResult, Estimator, ModelSpec, Predictor, ResampleMode};
use super::folds::kfold_plan;
use super::grid::{grid_search_with, GridResult, GridSpec};
use super::metrics::{confusion, metrics, MetricsReport};
use super::roc::{roc_auc, roc_curve, RocPoint};
use crate::error::{Error, Result};
use crate::models::{default_params, HyperParams, ModelKind};
use crate::rng::{derive_seed, stream};
use crate::tabular::{class_counts, oversample_minority, train_test_split, EncodedMatrix, SplitIndices};

/// How models are tuned and assessed before the held-out test evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    /// Grid search by k-fold CV on the training set, refit of the best cell.
    #[serde(alias = "full")]
    CvWithGrid,
    /// One fit with default parameters.
    #[serde(alias = "no-cv")]
    NoCvNoGrid,
    /// k-fold CV of the default parameters for reporting, then one fit.
    #[serde(alias = "cv-only")]
    CvWithoutGrid,
}

impl RegimeKind {
    pub const ALL: [RegimeKind; 3] = [
        RegimeKind::CvWithGrid,
        RegimeKind::NoCvNoGrid,
        RegimeKind::CvWithoutGrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegimeKind::CvWithGrid => "cv_with_grid",
            RegimeKind::NoCvNoGrid => "no_cv_no_grid",
            RegimeKind::CvWithoutGrid => "cv_without_grid",
        }
    }

    /// Short command-line spelling: `full`, `no-cv`, `cv-only`.
    pub fn cli_name(self) -> &'static str {
        match self {
            RegimeKind::CvWithGrid => "full",
            RegimeKind::NoCvNoGrid => "no-cv",
            RegimeKind::CvWithoutGrid => "cv-only",
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegimeKind {
    type Err = Error;

    /// Accepts either the snake-case name or the command-line spelling.
    fn from_str(s: &str) -> Result<Self> {
        RegimeKind::ALL
            .into_iter()
            .find(|r| r.name() == s || r.cli_name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown regime `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationRegime {
    pub kind: RegimeKind,
    pub resample: ResampleMode,
}

/// Knobs shared by every model in a regime run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimeSettings {
    pub k: usize,
    pub stratified: bool,
    /// Replaces the reference grid of a model kind.
    pub grids: BTreeMap<ModelKind, GridSpec>,
    /// Merged over the built-in defaults of a model kind.
    pub defaults: BTreeMap<ModelKind, HyperParams>,
}

impl Default for RegimeSettings {
    fn default() -> Self {
        Self {
            k: 5,
            stratified: true,
            grids: BTreeMap::new(),
            defaults: BTreeMap::new(),
        }
    }
}

impl RegimeSettings {
    pub fn grid(&self, kind: ModelKind) -> GridSpec {
        self.grids
            .get(&kind)
            .cloned()
            .unwrap_or_else(|| GridSpec::reference(kind))
    }

    pub fn default_params(&self, kind: ModelKind) -> HyperParams {
        let base = default_params(kind);
        match self.defaults.get(&kind) {
            Some(over) => over.merged_over(&base),
            None => base,
        }
    }
}

/// Anything [`run_regime_with`] can evaluate: a name, default parameters,
/// grid cells and an estimator factory.
pub struct Candidate<'a> {
    pub name: String,
    pub defaults: HyperParams,
    pub grid: Vec<HyperParams>,
    pub build: Box<dyn Fn(&HyperParams) -> Box<dyn Estimator> + 'a>,
}

impl Candidate<'static> {
    /// A built-in model kind with grid and defaults from `settings`.
    pub fn model(kind: ModelKind, settings: &RegimeSettings) -> Result<Self> {
        let grid = settings.grid(kind);
        grid.validate()?;
        let defaults = settings.default_params(kind);
        crate::models::validate(kind, &defaults)?;
        let base = defaults.clone();
        Ok(Self {
            name: kind.name().to_owned(),
            defaults,
            grid: grid.cells(),
            build: Box::new(move |p: &HyperParams| -> Box<dyn Estimator> {
                Box::new(ModelSpec {
                    kind,
                    params: p.merged_over(&base),
                })
            }),
        })
    }
}

/// Result for one model; `error` is set and the rest empty when it failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelOutcome {
    pub model: String,
    /// Parameters of the final fit: the chosen grid cell (if any) over the
    /// defaults.
    pub params: Option<HyperParams>,
    pub metrics: Option<MetricsReport>,
    pub roc: Vec<RocPoint>,
    pub cv: Option<CvResult>,
    pub grid: Option<GridResult>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: RegimeKind,
    pub resample: ResampleMode,
    pub k: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Share of negatives in the test set, the accuracy of always predicting 0.
    pub test_negative_prevalence: f64,
    pub outcomes: Vec<ModelOutcome>,
    pub warnings: Vec<String>,
}

pub const LEAKAGE_WARNING: &str =
    "pre_split resampling: minority rows were duplicated before the train/test split, so test rows may also appear in training data";

/// Oversamples the whole matrix with `derive_seed(seed, RESAMPLE, 0)` and
/// splits the result; the input to [`run_regime`] under
/// [`ResampleMode::PreSplit`].
pub fn pre_split_resample(data: &EncodedMatrix, ratio: f64, seed: u64) -> Result<(EncodedMatrix, SplitIndices)> {
    let (x, y) = oversample_minority(&data.features, &data.target, derive_seed(seed, stream::RESAMPLE, 0))?;
    let mut resampled = data.clone();
    resampled.features = x;
    resampled.target = y;
    let split = train_test_split(&resampled.target, ratio, derive_seed(seed, stream::SPLIT, 0), true)?;
    Ok((resampled, split))
}

/// Evaluates each model kind under `regime` on the given split.
pub fn run_regime(
    regime: EvaluationRegime,
    data: &EncodedMatrix,
    split: &SplitIndices,
    kinds: &[ModelKind],
    settings: &RegimeSettings,
    seed: u64,
) -> Result<RegimeReport> {
    let mut failures = Vec::new();
    let mut candidates = Vec::new();
    for &kind in kinds {
        match Candidate::model(kind, settings) {
            Ok(c) => candidates.push(c),
            Err(e) => failures.push(failed(kind.name(), &e)),
        }
    }
    let mut report = run_regime_with(regime, data, split, &candidates, settings, seed)?;
    report.outcomes.extend(failures);
    let order: Vec<&str> = kinds.iter().map(|k| k.name()).collect();
    report
        .outcomes
        .sort_by_key(|o| order.iter().position(|n| *n == o.model).unwrap_or(usize::MAX));
    Ok(report)
}

fn failed(name: &str, e: &Error) -> ModelOutcome {
    log::warn!("model {name} failed: {e}");
    ModelOutcome {
        model: name.to_owned(),
        params: None,
        metrics: None,
        roc: Vec::new(),
        cv: None,
        grid: None,
        error: Some(e.to_string()),
    }
}

/// [`run_regime`] over arbitrary candidates.
///
/// The training rows are planned into `settings.k` folds with
/// `derive_seed(seed, FOLDS, 0)`. Under [`ResampleMode::FoldSafe`] the
/// final training set is oversampled with `derive_seed(seed, FINAL_FIT, 0)`;
/// final fits use `derive_seed(seed, FINAL_FIT, 1)`. The test rows are
/// never resampled here.
pub fn run_regime_with(
    regime: EvaluationRegime,
    data: &EncodedMatrix,
    split: &SplitIndices,
    candidates: &[Candidate<'_>],
    settings: &RegimeSettings,
    seed: u64,
) -> Result<RegimeReport> {
    let n = data.n_rows();
    if split.train.iter().chain(&split.test).any(|&i| i >= n) {
        return Err(Error::InvalidConfig("split indices exceed the matrix".into()));
    }
    let train = data.select_rows(&split.train);
    let test = data.select_rows(&split.test);
    let mut warnings = Vec::new();
    if regime.resample == ResampleMode::PreSplit {
        log::warn!("{LEAKAGE_WARNING}");
        warnings.push(LEAKAGE_WARNING.to_owned());
    }
    let (neg, _) = class_counts(&test.target);
    let test_negative_prevalence = neg as f64 / test.n_rows().max(1) as f64;

    let plan = if regime.kind == RegimeKind::NoCvNoGrid {
        None
    } else {
        let plan = kfold_plan(
            &train.target,
            settings.k,
            settings.stratified,
            derive_seed(seed, stream::FOLDS, 0),
        )?;
        if settings.stratified && !plan.stratified {
            warnings.push(format!("stratified {}-fold CV downgraded to plain folds", settings.k));
        }
        Some(plan)
    };

    let fit_set = if regime.resample == ResampleMode::FoldSafe {
        let (x, y) = oversample_minority(&train.features, &train.target, derive_seed(seed, stream::FINAL_FIT, 0))?;
        let mut t = train.clone();
        t.features = x;
        t.target = y;
        t
    } else {
        train.clone()
    };
    let cv_mode = if regime.resample == ResampleMode::FoldSafe {
        ResampleMode::FoldSafe
    } else {
        ResampleMode::None
    };

    let mut outcomes = Vec::with_capacity(candidates.len());
    for cand in candidates {
        let run = || -> Result<ModelOutcome> {
            let (params, cv, grid) = match regime.kind {
                RegimeKind::NoCvNoGrid => (cand.defaults.clone(), None, None),
                RegimeKind::CvWithoutGrid => {
                    let est = (cand.build)(&cand.defaults);
                    let cv = cross_val_accuracy(est.as_ref(), &train, plan.as_ref().unwrap(), cv_mode, seed)?;
                    (cand.defaults.clone(), Some(cv), None)
                }
                RegimeKind::CvWithGrid => {
                    let g = grid_search_with(&cand.grid, &cand.build, &train, plan.as_ref().unwrap(), cv_mode, seed)?;
                    (g.best_params.merged_over(&cand.defaults), None, Some(g))
                }
            };
            let model = (cand.build)(&params).fit(&fit_set, derive_seed(seed, stream::FINAL_FIT, 1))?;
            let (report, roc) = evaluate(model.as_ref(), &test)?;
            Ok(ModelOutcome {
                model: cand.name.clone(),
                params: Some(params),
                metrics: Some(report),
                roc,
                cv,
                grid,
                error: None,
            })
        };
        outcomes.push(run().unwrap_or_else(|e| failed(&cand.name, &e)));
    }
    Ok(RegimeReport {
        regime: regime.kind,
        resample: regime.resample,
        k: settings.k,
        train_rows: train.n_rows(),
        test_rows: test.n_rows(),
        test_negative_prevalence,
        outcomes,
        warnings,
    })
}

/// Metrics and ROC curve of `model` on `test`. AUC and the curve are left
/// empty when the test set holds a single class.
pub fn evaluate(model: &dyn Predictor, test: &EncodedMatrix) -> Result<(MetricsReport, Vec<RocPoint>)> {
    let scores = model.predict_score(&test.features)?;
    let pred: Vec<u8> = scores.iter().map(|&s| u8::from(s >= 0.5)).collect();
    let mut report = metrics(&confusion(&test.target, &pred)?)?;
    let (neg, pos) = class_counts(&test.target);
    let roc = if neg > 0 && pos > 0 {
        report.roc_auc = Some(roc_auc(&test.target, &scores)?);
        roc_curve(&test.target, &scores)?
    } else {
        Vec::new()
    };
    Ok((report, roc))
}
