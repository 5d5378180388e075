use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabular::class_counts;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Rows scoring at or above this value are called positive.
    pub threshold: f64,
}

/// Area under the ROC curve with ties counted as one half: the mean rank of
/// the positives (average ranks for ties) minus its minimum, over `n_pos * n_neg`.
pub fn roc_auc(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch(y_true.len(), scores.len()));
    }
    crate::tabular::check_binary(y_true)?;
    let (neg, pos) = class_counts(y_true);
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        // Ranks i+1 ..= j+1 share their average.
        let avg = (i + j + 2) as f64 / 2.0;
        let positives = idx[i..=j].iter().filter(|&&k| y_true[k] == 1).count();
        rank_sum += avg * positives as f64;
        i = j + 1;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// ROC curve with one point per distinct score (descending thresholds),
/// starting at `(0, 0)` and ending at `(1, 1)`.
pub fn roc_curve(y_true: &[u8], scores: &[f64]) -> Result<Vec<RocPoint>> {
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch(y_true.len(), scores.len()));
    }
    let (neg, pos) = class_counts(y_true);
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < idx.len() {
        let s = scores[idx[i]];
        while i < idx.len() && scores[idx[i]] == s {
            if y_true[idx[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold: s,
        });
    }
    Ok(points)
}

/// Trapezoidal area under a curve from [`roc_curve`].
pub fn curve_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn extremes() {
        let y = [0, 0, 1, 1];
        assert_eq!(roc_auc(&y, &[0.0, 0.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(roc_auc(&y, &[0.3; 4]).unwrap(), 0.5);
        assert_eq!(roc_auc(&y, &[1.0, 1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(roc_auc(&[1, 1], &[0.1, 0.2]), Err(Error::SingleClass)));
    }

    #[test]
    fn curve_endpoints() {
        let c = roc_curve(&[0, 1, 0, 1], &[0.1, 0.4, 0.35, 0.8]).unwrap();
        assert_eq!((c[0].fpr, c[0].tpr), (0.0, 0.0));
        let last = c.last().unwrap();
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        assert_eq!(c.len(), 5);
        assert!((curve_area(&c) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn rank_and_trapezoid_agree(pairs in proptest::collection::vec((0u8..2, 0u8..6), 2..80)) {
            let (y, s): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
            let s: Vec<f64> = s.into_iter().map(f64::from).collect();
            let (neg, pos) = class_counts(&y);
            prop_assume!(neg > 0 && pos > 0);
            let a = roc_auc(&y, &s).unwrap();
            prop_assert!((a - curve_area(&roc_curve(&y, &s).unwrap())).abs() < 1e-12);
            let neg_s: Vec<f64> = s.iter().map(|v| -v).collect();
            let b = roc_auc(&y, &neg_s).unwrap();
            // With ties, the tie mass is shared symmetrically.
            prop_assert!((a + b - 1.0).abs() < 1e-12);
            let cubed: Vec<f64> = s.iter().map(|v| v * v * v + 2.0).collect();
            prop_assert!((roc_auc(&y, &cubed).unwrap() - a).abs() < 1e-12);
        }
    }
}
