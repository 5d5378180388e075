use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::rng;

/// Random oversampling of the minority class to a 1:1 ratio.
///
/// The output starts with the original rows unchanged, followed by minority
/// rows drawn uniformly with replacement. A balanced input is returned as is.
pub fn oversample_minority(features: &Matrix, target: &[u8], seed: u64) -> Result<(Matrix, Vec<u8>)> {
    if features.rows() != target.len() {
        return Err(Error::LengthMismatch(features.rows(), target.len()));
    }
    super::check_binary(target)?;
    let (neg, pos) = super::class_counts(target);
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let minority_label = u8::from(pos < neg);
    let minority: Vec<usize> = (0..target.len()).filter(|&i| target[i] == minority_label).collect();
    let deficit = neg.abs_diff(pos);

    let mut out = features.clone();
    let mut y = target.to_vec();
    let mut rng = rng(seed);
    for _ in 0..deficit {
        let pick = minority[rng.random_range(0..minority.len())];
        out.push_row(features.row(pick))?;
        y.push(minority_label);
    }
    Ok((out, y))
}
