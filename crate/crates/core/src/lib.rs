//! Tabular binary classification toolkit.
//!
//! The crate covers a complete, reproducible workflow for imbalanced tabular
//! data such as the public stroke-prediction dataset:
//!
//! * [`tabular`]: typed CSV ingestion, label encoding, stratified splits,
//!   minority oversampling.
//! * [`preprocess`]: null imputation, outlier filtering, duplicate scans,
//!   min-max scaling, histograms and correlation matrices.
//! * [`featsel`]: eight feature selectors and the vote tally that fuses them.
//! * [`models`]: nine classifiers written from scratch behind one contract.
//! * [`tuning`]: stratified k-fold CV, grid search, metrics, ROC analysis and
//!   the three evaluation regimes.
//! * [`report`]: run configuration, pipeline orchestration and file output.
//!
//! All randomness flows from explicit `u64` seeds; see [`rng`].

pub mod error;
pub mod featsel;
pub mod matrix;
pub mod models;
pub mod preprocess;
pub mod report;
pub mod rng;
pub mod stats;
pub mod tabular;
pub mod tuning;

pub use error::{Error, Result};
pub use matrix::Matrix;
