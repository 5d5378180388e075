//! Null imputation, outlier filtering, duplicate detection, scaling and
//! distribution summaries.
//!
//! Every function takes a table by reference and returns a new one; nothing
//! here mutates shared state.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::pearson;
use crate::tabular::{Cell, ColumnKind, EncodedMatrix, Table};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy", content = "constant_value")]
pub enum ImputeStrategy {
    /// Mean of the column's non-null cells.
    Mean,
    Constant(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImputationPolicy {
    pub column: String,
    #[serde(flatten)]
    pub strategy: ImputeStrategy,
}

impl ImputationPolicy {
    pub fn mean(column: &str) -> Self {
        Self {
            column: column.to_owned(),
            strategy: ImputeStrategy::Mean,
        }
    }

    pub fn constant(column: &str, value: f64) -> Self {
        Self {
            column: column.to_owned(),
            strategy: ImputeStrategy::Constant(value),
        }
    }
}

/// Fills the nulls of one numeric column. Returns the new table and the
/// number of cells replaced.
pub fn impute_nulls(table: &Table, policy: &ImputationPolicy) -> Result<(Table, usize)> {
    let j = table.numeric_column_index(&policy.column)?;
    let fill = match policy.strategy {
        ImputeStrategy::Constant(v) => v,
        ImputeStrategy::Mean => {
            let present: Vec<f64> = table.column(j).filter_map(Cell::as_number).collect();
            if present.is_empty() {
                return Err(Error::AllNull(policy.column.clone()));
            }
            present.iter().sum::<f64>() / present.len() as f64
        }
    };
    let mut replaced = 0;
    let rows = table
        .rows()
        .iter()
        .map(|row| {
            let mut row = row.clone();
            if row[j].is_null() {
                row[j] = Cell::Number(fill);
                replaced += 1;
            }
            row
        })
        .collect();
    Ok((table.map_rows(rows), replaced))
}

/// Values strictly below `lower_bound` or strictly above `upper_bound` are outliers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutlierRule {
    pub column: String,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl OutlierRule {
    pub fn new(column: &str, lower_bound: f64, upper_bound: f64) -> Result<Self> {
        if !(lower_bound < upper_bound) {
            return Err(Error::InvalidRule(format!(
                "lower bound {lower_bound} must be below upper bound {upper_bound}"
            )));
        }
        Ok(Self {
            column: column.to_owned(),
            lower_bound,
            upper_bound,
        })
    }

    /// bmi outside `[12.7, 45]`.
    pub fn stroke_bmi() -> Self {
        Self::new("bmi", 12.7, 45.0).expect("static bounds are ordered")
    }

    fn is_outlier(&self, v: f64) -> bool {
        v > self.upper_bound || v < self.lower_bound
    }
}

/// What to do with rows flagged by an [`OutlierRule`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "action", content = "value")]
pub enum OutlierAction {
    #[default]
    Drop,
    Replace(f64),
}

/// Removes outlier rows, preserving the order of survivors. Returns the
/// filtered table and the original indices of the dropped rows.
pub fn drop_outliers(table: &Table, rule: &OutlierRule) -> Result<(Table, Vec<usize>)> {
    let j = outlier_column(table, rule)?;
    let mut kept = Vec::with_capacity(table.n_rows());
    let mut dropped = Vec::new();
    for (i, row) in table.rows().iter().enumerate() {
        match row[j].as_number() {
            Some(v) if rule.is_outlier(v) => dropped.push(i),
            _ => kept.push(i),
        }
    }
    Ok((table.select_rows(&kept), dropped))
}

/// Overwrites outlier cells with `value`; returns the count replaced.
pub fn replace_outliers(table: &Table, rule: &OutlierRule, value: f64) -> Result<(Table, usize)> {
    let j = outlier_column(table, rule)?;
    let mut replaced = 0;
    let rows = table
        .rows()
        .iter()
        .map(|row| {
            let mut row = row.clone();
            if row[j].as_number().is_some_and(|v| rule.is_outlier(v)) {
                row[j] = Cell::Number(value);
                replaced += 1;
            }
            row
        })
        .collect();
    Ok((table.map_rows(rows), replaced))
}

fn outlier_column(table: &Table, rule: &OutlierRule) -> Result<usize> {
    if !(rule.lower_bound < rule.upper_bound) {
        return Err(Error::InvalidRule(format!(
            "lower bound {} must be below upper bound {}",
            rule.lower_bound, rule.upper_bound
        )));
    }
    table.numeric_column_index(&rule.column)
}

/// Every pair `(i, j)`, `i < j`, of rows equal on all columns, or on `subset`
/// when given. Pairs are sorted.
pub fn find_duplicates(table: &Table, subset: Option<&[&str]>) -> Result<Vec<(usize, usize)>> {
    let cols: Vec<usize> = match subset {
        Some(names) => names.iter().map(|n| table.column_index(n)).collect::<Result<_>>()?,
        None => (0..table.n_columns()).collect(),
    };
    let mut groups: HashMap<Vec<_>, Vec<usize>> = HashMap::new();
    for (i, row) in table.rows().iter().enumerate() {
        let key: Vec<_> = cols.iter().map(|&j| row[j].key()).collect();
        groups.entry(key).or_default().push(i);
    }
    let mut pairs = Vec::new();
    for members in groups.values().filter(|m| m.len() > 1) {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Maps a column onto `[0, 1]` by `(v - min) / (max - min)`. A constant column
/// becomes all zeros. Returns the bounds used.
pub fn normalize_minmax(table: &Table, column: &str) -> Result<(Table, (f64, f64))> {
    let j = table.numeric_column_index(column)?;
    if table.null_count(j) > 0 {
        return Err(Error::NullPresent(column.to_owned()));
    }
    let (lo, hi) = table
        .column(j)
        .filter_map(Cell::as_number)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    let rows = table
        .rows()
        .iter()
        .map(|row| {
            let mut row = row.clone();
            if let Cell::Number(v) = row[j] {
                row[j] = Cell::Number(if span > 0.0 { (v - lo) / span } else { 0.0 });
            }
            row
        })
        .collect();
    Ok((table.map_rows(rows), (lo, hi)))
}

/// Frequency table of one column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub column: String,
    /// `k + 1` strictly ascending edges. Categorical columns use `code ± 0.5`.
    pub bin_edges: Vec<f64>,
    pub frequencies: Vec<usize>,
    /// Bin labels for categorical columns, in code order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.frequencies.iter().sum()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Most frequent bin (first on ties) as `(label, proportion)`.
    pub fn mode(&self) -> Option<(String, f64)> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let (idx, &count) = self.frequencies.iter().enumerate().rev().max_by_key(|(_, &c)| c)?;
        let label = match &self.categories {
            Some(c) => c[idx].clone(),
            None => format!("[{}, {}]", self.bin_edges[idx], self.bin_edges[idx + 1]),
        };
        Some((label, count as f64 / total as f64))
    }

    /// Two-column `bin_midpoint,frequency` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_midpoint,frequency\n");
        for (m, f) in self.midpoints().iter().zip(&self.frequencies) {
            let _ = writeln!(out, "{m},{f}");
        }
        out
    }
}

/// Equal-width histogram over `[min, max]` (last bin closed) for numeric
/// columns; one bin per category for categorical columns. Nulls are skipped.
pub fn histogram(table: &Table, column: &str, bin_count: usize) -> Result<Histogram> {
    if bin_count == 0 {
        return Err(Error::ZeroBins);
    }
    let j = table.column_index(column)?;
    let schema = &table.schema()[j];
    if schema.kind == ColumnKind::Categorical {
        let mut cats: Vec<String> = schema.allowed_categories.clone().unwrap_or_default();
        cats.extend(table.column(j).filter_map(|c| match c {
            Cell::Category(s) => Some(s.clone()),
            _ => None,
        }));
        cats.sort();
        cats.dedup();
        let mut freq = vec![0usize; cats.len()];
        for cell in table.column(j) {
            if let Cell::Category(s) = cell {
                let idx = cats.binary_search(s).expect("category collected above");
                freq[idx] += 1;
            }
        }
        let edges = (0..=cats.len()).map(|i| i as f64 - 0.5).collect();
        return Ok(Histogram {
            column: column.to_owned(),
            bin_edges: edges,
            frequencies: freq,
            categories: Some(cats),
        });
    }

    let values: Vec<f64> = table.column(j).filter_map(Cell::as_number).collect();
    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if values.is_empty() {
        (lo, hi) = (0.0, 1.0);
    } else if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bin_count as f64;
    let mut edges: Vec<f64> = (0..bin_count).map(|i| lo + width * i as f64).collect();
    edges.push(hi);
    let mut freq = vec![0usize; bin_count];
    for v in values {
        let mut idx = (((v - lo) / width).floor() as usize).min(bin_count - 1);
        while idx > 0 && v < edges[idx] {
            idx -= 1;
        }
        while idx + 1 < bin_count && v >= edges[idx + 1] {
            idx += 1;
        }
        freq[idx] += 1;
    }
    Ok(Histogram {
        column: column.to_owned(),
        bin_edges: edges,
        frequencies: freq,
        categories: None,
    })
}

/// Pairwise Pearson correlations between encoded feature columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Zero-variance columns; their rows and columns are all zero.
    pub degenerate: Vec<bool>,
}

impl CorrelationMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature");
        for n in &self.names {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
        for (n, row) in self.names.iter().zip(&self.values) {
            out.push_str(n);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn correlation_matrix(matrix: &EncodedMatrix) -> CorrelationMatrix {
    let m = matrix.n_features();
    let columns: Vec<Vec<f64>> = (0..m).map(|j| matrix.features.column(j)).collect();
    let degenerate: Vec<bool> = columns.iter().map(|c| pearson(c, c).is_none()).collect();
    let mut values = vec![vec![0.0; m]; m];
    for a in 0..m {
        if degenerate[a] {
            continue;
        }
        values[a][a] = 1.0;
        for b in a + 1..m {
            if let Some(r) = pearson(&columns[a], &columns[b]) {
                values[a][b] = r;
                values[b][a] = r;
            }
        }
    }
    CorrelationMatrix {
        names: matrix.feature_names.clone(),
        values,
        degenerate,
    }
}

/// Summary of the preprocessing stage.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub rows_in: usize,
    pub rows_out: usize,
    pub imputed_count: BTreeMap<String, usize>,
    pub dropped_rows: usize,
    /// Rows dropped as outliers whose target is positive.
    pub dropped_positive_rows: usize,
    pub replaced_outliers: usize,
    /// Number of duplicate pairs found.
    pub duplicate_rows: usize,
    pub normalization_bounds: BTreeMap<String, (f64, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::tabular::ColumnSchema;
    use proptest::prelude::*;

    fn numeric_table(values: &[Option<f64>]) -> Table {
        let schema = vec![
            ColumnSchema::new("x", ColumnKind::Real),
            ColumnSchema::new("y", ColumnKind::BinaryTarget),
        ];
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![v.map_or(Cell::Null, Cell::Number), Cell::Number((i % 2) as f64)])
            .collect();
        Table::new(schema, rows).unwrap()
    }

    fn xs(t: &Table) -> Vec<f64> {
        t.column(0).map(|c| c.as_number().unwrap()).collect()
    }

    #[test]
    fn mean_imputation() {
        let t = numeric_table(&[Some(1.0), None, Some(3.0)]);
        let (t2, n) = impute_nulls(&t, &ImputationPolicy::mean("x")).unwrap();
        assert_eq!(n, 1);
        assert_eq!(xs(&t2), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn imputation_noop_and_constant() {
        let t = numeric_table(&[Some(1.0), Some(3.0)]);
        let (t2, n) = impute_nulls(&t, &ImputationPolicy::mean("x")).unwrap();
        assert_eq!(n, 0);
        assert_eq!(t2, t);
        let t = numeric_table(&[None, Some(3.0)]);
        let (t2, n) = impute_nulls(&t, &ImputationPolicy::constant("x", 0.0)).unwrap();
        assert_eq!(n, 1);
        assert_eq!(xs(&t2), vec![0.0, 3.0]);
    }

    #[test]
    fn imputation_errors() {
        let t = numeric_table(&[None, None]);
        assert!(matches!(
            impute_nulls(&t, &ImputationPolicy::mean("x")),
            Err(Error::AllNull(_))
        ));
        assert!(matches!(
            impute_nulls(&t, &ImputationPolicy::mean("nope")),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn outliers_scan() {
        let t = numeric_table(&[Some(10.0), Some(20.0), Some(50.0)]);
        let rule = OutlierRule::new("x", 12.7, 45.0).unwrap();
        let (t2, dropped) = drop_outliers(&t, &rule).unwrap();
        assert_eq!(xs(&t2), vec![20.0]);
        assert_eq!(dropped, vec![0, 2]);
        let (t3, again) = drop_outliers(&t2, &rule).unwrap();
        assert!(again.is_empty());
        assert_eq!(t3, t2);
    }

    #[test]
    fn outlier_bounds_are_open() {
        let t = numeric_table(&[Some(12.7), Some(45.0), Some(45.0001)]);
        let rule = OutlierRule::new("x", 12.7, 45.0).unwrap();
        let (_, dropped) = drop_outliers(&t, &rule).unwrap();
        assert_eq!(dropped, vec![2]);
        let (t2, n) = replace_outliers(&t, &rule, 0.0).unwrap();
        assert_eq!(n, 1);
        assert_eq!(xs(&t2), vec![12.7, 45.0, 0.0]);
    }

    #[test]
    fn outlier_rule_validation() {
        assert!(OutlierRule::new("bmi", 5.0, 5.0).is_err());
        let schema = vec![
            ColumnSchema::categorical("c", &["a"]),
            ColumnSchema::new("y", ColumnKind::BinaryTarget),
        ];
        let t = Table::new(schema, vec![]).unwrap();
        let rule = OutlierRule::new("c", 0.0, 1.0).unwrap();
        assert!(matches!(drop_outliers(&t, &rule), Err(Error::NonNumericColumn(_))));
    }

    fn people() -> Table {
        let schema = vec![
            ColumnSchema::new("age", ColumnKind::Real),
            ColumnSchema::new("bmi", ColumnKind::Real),
            ColumnSchema::categorical("city", &["A", "B"]),
            ColumnSchema::new("y", ColumnKind::BinaryTarget),
        ];
        let r = |a: f64, b: f64, c: &str, y: f64| {
            vec![
                Cell::Number(a),
                Cell::Number(b),
                Cell::Category(c.into()),
                Cell::Number(y),
            ]
        };
        Table::new(
            schema,
            vec![
                r(30.0, 22.0, "A", 0.0),
                r(41.0, 25.0, "B", 0.0),
                r(30.0, 22.0, "B", 1.0),
                r(55.0, 31.0, "A", 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn subset_duplicates() {
        let t = people();
        assert_eq!(find_duplicates(&t, Some(&["age", "bmi"])).unwrap(), vec![(0, 2)]);
        assert!(find_duplicates(&t, None).unwrap().is_empty());
        assert!(matches!(
            find_duplicates(&t, Some(&["zzz"])),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn self_append_gives_one_pair_per_row() {
        let t = people();
        let one = t.concat(&t.select_rows(&[1])).unwrap();
        assert_eq!(find_duplicates(&one, None).unwrap(), vec![(1, 4)]);
        let doubled = t.concat(&t).unwrap();
        assert_eq!(find_duplicates(&doubled, None).unwrap().len(), t.n_rows());
    }

    #[test]
    fn minmax_cases() {
        let t = numeric_table(&[Some(0.08), Some(40.0), Some(82.0)]);
        let (t2, b) = normalize_minmax(&t, "x").unwrap();
        assert_eq!(b, (0.08, 82.0));
        let v = xs(&t2);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[2], 1.0);

        let t = numeric_table(&[Some(0.0), Some(1.0)]);
        assert_eq!(xs(&normalize_minmax(&t, "x").unwrap().0), vec![0.0, 1.0]);
        let t = numeric_table(&[Some(5.0), Some(5.0), Some(5.0)]);
        assert_eq!(xs(&normalize_minmax(&t, "x").unwrap().0), vec![0.0; 3]);
        let t = numeric_table(&[Some(5.0), None]);
        assert!(matches!(normalize_minmax(&t, "x"), Err(Error::NullPresent(_))));
    }

    #[test]
    fn histogram_hand_count() {
        let t = numeric_table(&[Some(0.0), Some(1.0), Some(2.0), Some(3.0), None]);
        let h = histogram(&t, "x", 2).unwrap();
        assert_eq!(h.frequencies, vec![2, 2]);
        assert_eq!(h.bin_edges, vec![0.0, 1.5, 3.0]);
        assert_eq!(h.total(), 4);
        assert!(matches!(histogram(&t, "x", 0), Err(Error::ZeroBins)));
        assert_eq!(h.to_csv(), "bin_midpoint,frequency\n0.75,2\n2.25,2\n");
    }

    #[test]
    fn categorical_histogram_mode() {
        let h = histogram(&people(), "city", 10).unwrap();
        assert_eq!(h.frequencies, vec![2, 2]);
        assert_eq!(h.mode().unwrap(), ("A".to_owned(), 0.5));
        assert_eq!(h.midpoints(), vec![0.0, 1.0]);
    }

    #[test]
    fn correlation_duplicate_and_constant_columns() {
        let x = Matrix::from_rows(&[vec![1.0, 1.0, 3.0], vec![2.0, 2.0, 3.0], vec![4.0, 4.0, 3.0]], 3).unwrap();
        let enc = EncodedMatrix::new(x, vec![0, 1, 0], vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let c = correlation_matrix(&enc);
        assert!((c.values[0][1] - 1.0).abs() < 1e-15);
        assert_eq!(c.degenerate, vec![false, false, true]);
        assert_eq!(c.values[2], vec![0.0; 3]);
    }

    proptest! {
        #[test]
        fn mean_imputation_preserves_mean(vals in proptest::collection::vec(proptest::option::weighted(0.7, -1e3f64..1e3), 1..60)) {
            prop_assume!(vals.iter().any(Option::is_some));
            let t = numeric_table(&vals);
            let present: Vec<f64> = vals.iter().flatten().copied().collect();
            let before = present.iter().sum::<f64>() / present.len() as f64;
            let (t2, _) = impute_nulls(&t, &ImputationPolicy::mean("x")).unwrap();
            let after = crate::stats::mean(&xs(&t2));
            prop_assert!((before - after).abs() < 1e-9);
        }

        #[test]
        fn minmax_in_unit_interval_and_invertible(vals in proptest::collection::vec(-1e4f64..1e4, 1..60)) {
            let t = numeric_table(&vals.iter().map(|v| Some(*v)).collect::<Vec<_>>());
            let (t2, (lo, hi)) = normalize_minmax(&t, "x").unwrap();
            for (orig, z) in vals.iter().zip(xs(&t2)) {
                prop_assert!((0.0..=1.0).contains(&z));
                if hi > lo {
                    prop_assert!((lo + z * (hi - lo) - orig).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn histogram_conserves_and_ignores_order(vals in proptest::collection::vec(-50f64..50.0, 1..80), bins in 1usize..12, seed: u64) {
            use rand::seq::SliceRandom;
            let t = numeric_table(&vals.iter().map(|v| Some(*v)).collect::<Vec<_>>());
            let h = histogram(&t, "x", bins).unwrap();
            prop_assert_eq!(h.total(), vals.len());
            prop_assert!(h.bin_edges.windows(2).all(|w| w[0] < w[1]));
            let mut perm: Vec<usize> = (0..vals.len()).collect();
            perm.shuffle(&mut crate::rng::rng(seed));
            let h2 = histogram(&t.select_rows(&perm), "x", bins).unwrap();
            prop_assert_eq!(h.frequencies, h2.frequencies);
        }
    }
}
