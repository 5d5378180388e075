//! Fold plans, metrics, cross-validation, grid search and evaluation regimes.

mod cv;
mod folds;
mod grid;
mod metrics;
mod regime;
mod roc;

pub use cv::{cross_val_accuracy, CvResult, Estimator, ModelSpec, Predictor, ResampleMode};
pub use folds::{kfold_plan, FoldPlan};
pub use grid::{grid_search, grid_search_with, GridCell, GridResult, GridSpec};
pub use metrics::{confusion, metrics, ConfusionMatrix, MetricsReport};
pub use regime::{
    evaluate, pre_split_resample, run_regime, run_regime_with, Candidate, EvaluationRegime, ModelOutcome, RegimeKind,
    RegimeReport, RegimeSettings, LEAKAGE_WARNING,
};
pub use roc::{curve_area, roc_auc, roc_curve, RocPoint};
