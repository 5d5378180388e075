//! Dataset representation, ingestion, encoding, splitting and resampling.

mod encode;
mod ingest;
mod resample;
mod schema;
mod split;
mod synth;
mod table;

pub use encode::{label_encode, EncodedMatrix, EncodingMap};
pub use ingest::{load_csv, read_records};
pub use resample::oversample_minority;
pub use schema::{stroke_schema, validate_schema, ColumnKind, ColumnSchema};
pub use split::{train_test_split, SplitIndices};
pub use synth::synthetic_stroke_csv;
pub use table::{Cell, Table};

use crate::error::{Error, Result};

/// Checks that every label is 0 or 1.
pub(crate) fn check_binary(target: &[u8]) -> Result<()> {
    match target.iter().find(|&&y| y > 1) {
        Some(&y) => Err(Error::NonBinaryValue(f64::from(y))),
        None => Ok(()),
    }
}

/// `(negatives, positives)`.
pub(crate) fn class_counts(target: &[u8]) -> (usize, usize) {
    let pos = target.iter().filter(|&&y| y == 1).count();
    (target.len() - pos, pos)
}
