//! Run configuration, pipeline orchestration and result files.

mod config;
mod pipeline;

pub use config::{DataSection, PreprocessSection, RunConfig, RunSection, SEED_ENV};
pub use pipeline::{
    compare_regimes, comparison_csv, emit_vote_table, grid_csv, metrics_csv, roc_csv, run_pipeline, run_stages,
    summary, IngestSummary, Provenance, ReportBundle, Stage,
};
