use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{SelectorKind, SelectorVerdict};
use crate::error::{Error, Result};
use crate::stats::{pearson, quantile};
use crate::tabular::EncodedMatrix;

/// Scores each feature by its Pearson correlation with the target and keeps
/// those with `|r| >= threshold`. Constant features score 0 and are never kept.
pub fn select_pearson(matrix: &EncodedMatrix, threshold: f64) -> Result<SelectorVerdict> {
    let y: Vec<f64> = matrix.target.iter().map(|&v| f64::from(v)).collect();
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::ConstantTarget);
    }
    let mut scores = Vec::with_capacity(matrix.n_features());
    let mut selected = Vec::with_capacity(matrix.n_features());
    for j in 0..matrix.n_features() {
        let r = pearson(&matrix.features.column(j), &y);
        scores.push(r.unwrap_or(0.0));
        selected.push(r.is_some_and(|r| r.abs() >= threshold));
    }
    Ok(SelectorVerdict::new(SelectorKind::Pearson, matrix, selected, scores))
}

/// Features with at most this many distinct values are used as categories directly.
const MAX_LEVELS: usize = 10;

/// Chi-square statistic of an `r x c` contingency table, with expected
/// counts `row_total * col_total / n`. Rows or columns that sum to zero are
/// ignored. Returns `(statistic, degrees of freedom)`.
pub fn chi2_statistic(table: &[Vec<f64>]) -> Result<(f64, usize)> {
    let n: f64 = table.iter().flatten().sum();
    if table.is_empty() || n <= 0.0 {
        return Err(Error::EmptyContingency);
    }
    let cols = table[0].len();
    let row_totals: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_totals: Vec<f64> = (0..cols).map(|c| table.iter().map(|r| r[c]).sum()).collect();
    let mut stat = 0.0;
    for (row, &rt) in table.iter().zip(&row_totals) {
        if rt <= 0.0 {
            continue;
        }
        for (&o, &ct) in row.iter().zip(&col_totals) {
            if ct <= 0.0 {
                continue;
            }
            let e = rt * ct / n;
            stat += (o - e) * (o - e) / e;
        }
    }
    let r = row_totals.iter().filter(|&&t| t > 0.0).count();
    let c = col_totals.iter().filter(|&&t| t > 0.0).count();
    Ok((stat, r.saturating_sub(1) * c.saturating_sub(1)))
}

/// Category index per row: the value's rank among distinct values for
/// low-cardinality features, otherwise its quartile bin.
fn categorize(col: &[f64]) -> Vec<usize> {
    let mut distinct = col.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() <= MAX_LEVELS {
        return col.iter().map(|v| distinct.partition_point(|d| d < v)).collect();
    }
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cuts = [0.25, 0.5, 0.75].map(|q| quantile(&sorted, q));
    col.iter().map(|v| cuts.iter().filter(|&&c| *v > c).count()).collect()
}

/// Chi-square test of independence between each feature and the target.
/// Keeps features whose p-value is below `alpha`.
pub fn select_chi2(matrix: &EncodedMatrix, alpha: f64) -> Result<SelectorVerdict> {
    let mut scores = Vec::new();
    let mut selected = Vec::new();
    for j in 0..matrix.n_features() {
        let col = matrix.features.column(j);
        if col.iter().any(|&v| v < 0.0) {
            return Err(Error::NegativeFeature(matrix.feature_names[j].clone()));
        }
        let cats = categorize(&col);
        let k = cats.iter().copied().max().map_or(0, |m| m + 1);
        let mut table = vec![vec![0.0; 2]; k];
        for (&c, &y) in cats.iter().zip(&matrix.target) {
            table[c][y as usize] += 1.0;
        }
        let (stat, df) = chi2_statistic(&table)?;
        let p = if df == 0 {
            1.0
        } else {
            ChiSquared::new(df as f64)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?
                .sf(stat)
        };
        scores.push(stat);
        selected.push(p < alpha);
    }
    Ok(SelectorVerdict::new(SelectorKind::Chi2, matrix, selected, scores))
}
