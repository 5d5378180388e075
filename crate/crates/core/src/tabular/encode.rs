use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::schema::ColumnKind;
use super::table::{Cell, Table};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Column name to `{category: code}`. Codes are `0..k` in ascending byte order of the category.
pub type EncodingMap = BTreeMap<String, BTreeMap<String, u32>>;

/// Numeric feature matrix plus binary target, after categorical encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedMatrix {
    pub features: Matrix,
    pub target: Vec<u8>,
    pub feature_names: Vec<String>,
    pub encoding_map: EncodingMap,
}

impl EncodedMatrix {
    pub fn new(features: Matrix, target: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        if features.rows() != target.len() {
            return Err(Error::LengthMismatch(features.rows(), target.len()));
        }
        if features.cols() != feature_names.len() {
            return Err(Error::ShapeMismatch {
                expected: features.cols(),
                found: feature_names.len(),
            });
        }
        super::check_binary(&target)?;
        Ok(Self {
            features,
            target,
            feature_names,
            encoding_map: EncodingMap::new(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_owned()))
    }

    /// Inverse of the encoding for one categorical column.
    pub fn decode(&self, column: &str, code: u32) -> Option<&str> {
        self.encoding_map
            .get(column)?
            .iter()
            .find(|(_, &c)| c == code)
            .map(|(name, _)| name.as_str())
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            target: indices.iter().map(|&i| self.target[i]).collect(),
            feature_names: self.feature_names.clone(),
            encoding_map: self.encoding_map.clone(),
        }
    }

    /// Keeps the named feature columns, in the order given.
    pub fn select_features(&self, names: &[String]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| self.feature_index(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            features: self.features.select_columns(&idx),
            target: self.target.clone(),
            feature_names: names.to_vec(),
            encoding_map: self
                .encoding_map
                .iter()
                .filter(|(k, _)| names.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        })
    }

    pub fn encoding_map_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.encoding_map)?)
    }
}

/// Replaces categorical columns by integer codes and extracts the target.
///
/// Identifier columns are dropped. Every non-identifier cell must be non-null.
pub fn label_encode(table: &Table) -> Result<EncodedMatrix> {
    let target_idx = table.target_index()?;
    let schema = table.schema();
    let feature_cols: Vec<usize> = (0..schema.len())
        .filter(|&j| j != target_idx && !schema[j].identifier)
        .collect();

    for &j in feature_cols.iter().chain(std::iter::once(&target_idx)) {
        if table.null_count(j) > 0 {
            return Err(Error::NullPresent(schema[j].name.clone()));
        }
    }

    let mut encoding_map = EncodingMap::new();
    for &j in &feature_cols {
        let col = &schema[j];
        if col.kind != ColumnKind::Categorical {
            continue;
        }
        let mut cats: Vec<&str> = col.allowed_categories.iter().flatten().map(String::as_str).collect();
        cats.extend(table.column(j).filter_map(|c| match c {
            Cell::Category(s) => Some(s.as_str()),
            _ => None,
        }));
        cats.sort_unstable();
        cats.dedup();
        let codes = cats
            .into_iter()
            .enumerate()
            .map(|(code, name)| (name.to_owned(), code as u32))
            .collect();
        encoding_map.insert(col.name.clone(), codes);
    }

    let n = table.n_rows();
    let m = feature_cols.len();
    let mut data = Vec::with_capacity(n * m);
    let mut target = Vec::with_capacity(n);
    for row in table.rows() {
        for &j in &feature_cols {
            let v = match &row[j] {
                Cell::Number(v) => *v,
                Cell::Category(s) => {
                    let codes = encoding_map
                        .get(&schema[j].name)
                        .ok_or_else(|| Error::NonNumericColumn(schema[j].name.clone()))?;
                    f64::from(codes[s])
                }
                Cell::Null => unreachable!("nulls rejected above"),
            };
            data.push(v);
        }
        let y = row[target_idx].as_number().unwrap_or(f64::NAN);
        target.push(match y {
            v if v == 0.0 => 0,
            v if v == 1.0 => 1,
            v => return Err(Error::NonBinaryValue(v)),
        });
    }

    Ok(EncodedMatrix {
        features: Matrix::new(n, m, data)?,
        target,
        feature_names: feature_cols.iter().map(|&j| schema[j].name.clone()).collect(),
        encoding_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{ColumnSchema, Table};

    fn gender_table() -> Table {
        let schema = vec![
            ColumnSchema::new("id", ColumnKind::Integer).identifier(),
            ColumnSchema::categorical("gender", &["Male", "Other", "Female"]),
            ColumnSchema::new("age", ColumnKind::Real),
            ColumnSchema::new("stroke", ColumnKind::BinaryTarget),
        ];
        let row = |id: f64, g: &str, a: f64, y: f64| {
            vec![
                Cell::Number(id),
                Cell::Category(g.into()),
                Cell::Number(a),
                Cell::Number(y),
            ]
        };
        Table::new(
            schema,
            vec![
                row(1.0, "Male", 30.0, 0.0),
                row(2.0, "Female", 40.0, 1.0),
                row(3.0, "Other", 50.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn codes_follow_lexicographic_order() {
        let enc = label_encode(&gender_table()).unwrap();
        let codes = &enc.encoding_map["gender"];
        assert_eq!(codes["Female"], 0);
        assert_eq!(codes["Male"], 1);
        assert_eq!(codes["Other"], 2);
        assert_eq!(enc.feature_names, vec!["gender", "age"]);
        assert_eq!(enc.features.column(0), vec![1.0, 0.0, 2.0]);
        assert_eq!(enc.target, vec![0, 1, 0]);
    }

    #[test]
    fn numeric_columns_pass_through() {
        let schema = vec![
            ColumnSchema::new("a", ColumnKind::Real),
            ColumnSchema::new("b", ColumnKind::Integer),
            ColumnSchema::new("y", ColumnKind::BinaryTarget),
        ];
        let rows = vec![
            vec![Cell::Number(0.5), Cell::Number(3.0), Cell::Number(1.0)],
            vec![Cell::Number(-2.25), Cell::Number(7.0), Cell::Number(0.0)],
        ];
        let enc = label_encode(&Table::new(schema, rows).unwrap()).unwrap();
        assert_eq!(enc.features.as_slice(), &[0.5, 3.0, -2.25, 7.0]);
    }

    #[test]
    fn nulls_are_rejected() {
        let t = gender_table();
        let mut rows = t.rows().to_vec();
        rows[1][2] = Cell::Null;
        let t = Table::new(t.schema().to_vec(), rows).unwrap();
        assert!(matches!(label_encode(&t), Err(Error::NullPresent(c)) if c == "age"));
    }

    #[test]
    fn decode_inverts_codes() {
        let t = gender_table();
        let enc = label_encode(&t).unwrap();
        for (i, row) in t.rows().iter().enumerate() {
            let code = enc.features.get(i, 0) as u32;
            assert_eq!(
                Some(enc.decode("gender", code).unwrap()),
                match &row[1] {
                    Cell::Category(s) => Some(s.as_str()),
                    _ => None,
                }
            );
        }
        let json = enc.encoding_map_json().unwrap();
        let back: EncodingMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, enc.encoding_map);
    }
}
