use serde::{Deserialize, Serialize};

use super::schema::{validate_schema, ColumnKind, ColumnSchema};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Category(String),
    Null,
}

impl Cell {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Cell::Null)
    }

    /// Hashable identity used by duplicate detection. `-0.0` and `0.0` compare equal.
    pub(crate) fn key(&self) -> CellKey<'_> {
        match self {
            Cell::Number(v) => CellKey::Number(if *v == 0.0 { 0 } else { v.to_bits() }),
            Cell::Category(s) => CellKey::Category(s),
            Cell::Null => CellKey::Null,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum CellKey<'a> {
    Number(u64),
    Category(&'a str),
    Null,
}

/// Row-major table over a typed schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    schema: Vec<ColumnSchema>,
    rows: Vec<Vec<Cell>>,
    /// `(column, category)` pairs seen during ingestion but absent from the schema.
    #[serde(default)]
    added_categories: Vec<(String, String)>,
}

impl Table {
    pub fn new(schema: Vec<ColumnSchema>, rows: Vec<Vec<Cell>>) -> Result<Self> {
        validate_schema(&schema)?;
        for row in &rows {
            if row.len() != schema.len() {
                return Err(Error::ShapeMismatch {
                    expected: schema.len(),
                    found: row.len(),
                });
            }
        }
        Ok(Self {
            schema,
            rows,
            added_categories: Vec::new(),
        })
    }

    pub(crate) fn with_added_categories(mut self, added: Vec<(String, String)>) -> Self {
        self.added_categories = added;
        self
    }

    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.schema.len()
    }

    pub fn added_categories(&self) -> &[(String, String)] {
        &self.added_categories
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_owned()))
    }

    pub fn target_index(&self) -> Result<usize> {
        self.schema
            .iter()
            .position(|c| c.kind == ColumnKind::BinaryTarget)
            .ok_or(Error::NoTargetColumn)
    }

    pub fn column(&self, index: usize) -> impl Iterator<Item = &Cell> + '_ {
        self.rows.iter().map(move |r| &r[index])
    }

    /// Index of a numeric column, erroring on unknown or categorical columns.
    pub fn numeric_column_index(&self, name: &str) -> Result<usize> {
        let idx = self.column_index(name)?;
        if !self.schema[idx].kind.is_numeric() {
            return Err(Error::NonNumericColumn(name.to_owned()));
        }
        Ok(idx)
    }

    pub fn null_count(&self, index: usize) -> usize {
        self.column(index).filter(|c| c.is_null()).count()
    }

    /// New table holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            added_categories: self.added_categories.clone(),
        }
    }

    pub(crate) fn map_rows(&self, rows: Vec<Vec<Cell>>) -> Self {
        Self {
            schema: self.schema.clone(),
            rows,
            added_categories: self.added_categories.clone(),
        }
    }

    /// Rows of `other` appended to `self`; schemas must agree on names and kinds.
    pub fn concat(&self, other: &Table) -> Result<Self> {
        let same = self.schema.len() == other.schema.len()
            && self
                .schema
                .iter()
                .zip(&other.schema)
                .all(|(a, b)| a.name == b.name && a.kind == b.kind);
        if !same {
            return Err(Error::InvalidSchema(
                "concatenating tables with different schemas".into(),
            ));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(self.map_rows(rows))
    }
}
