use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("header mismatch: expected {expected:?}, found {found:?}")]
    HeaderMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("unparsable cell at row {row}, column `{column}`: {value:?}")]
    UnparsableCell {
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        value: String,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("column `{0}` contains null cells")]
    NullPresent(String),
    #[error("schema has no binary-target column")]
    NoTargetColumn,
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{0}` is not numeric")]
    NonNumericColumn(String),
    #[error("column `{0}` has no non-null values")]
    AllNull(String),
    #[error("histogram needs at least one bin")]
    ZeroBins,
    #[error("invalid outlier rule: {0}")]
    InvalidRule(String),
    #[error("split ratio {ratio} leaves an empty side for n = {n}")]
    DegenerateRatio { ratio: f64, n: usize },
    #[error("class {0} has no members")]
    EmptyClass(u8),
    #[error("target contains a single class")]
    SingleClass,
    #[error("target has zero variance")]
    ConstantTarget,
    #[error("feature `{0}` has negative values")]
    NegativeFeature(String),
    #[error("contingency table is empty")]
    EmptyContingency,
    #[error("n_keep = {n_keep} exceeds feature count {features}")]
    NKeepTooLarge { n_keep: usize, features: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("selector verdicts cover different feature lists")]
    VerdictShapeMismatch,
    #[error("invalid parameter `{name}` = {value}: expected {allowed}")]
    InvalidParam {
        name: String,
        value: String,
        allowed: String,
    },
    #[error("shape mismatch: expected {expected} columns, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("k = {k} exceeds row count {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("every grid cell failed")]
    AllCellsFailed,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("value {0} is not binary")]
    NonBinaryValue(f64),
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &str, value: impl std::fmt::Display, allowed: &str) -> Self {
        Error::InvalidParam {
            name: name.to_owned(),
            value: value.to_string(),
            allowed: allowed.to_owned(),
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
