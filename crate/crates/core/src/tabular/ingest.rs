use std::path::Path;

use super::schema::{validate_schema, ColumnKind, ColumnSchema};
use super::table::{Cell, Table};
use crate::error::{Error, Result};

fn is_null_literal(raw: &str) -> bool {
    raw.is_empty() || raw == "N/A"
}

fn open(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(csv::ReaderBuilder::new().has_headers(true).from_path(path)?)
}

/// Reads a CSV file against `schema`.
///
/// The header must list the schema's column names in order. `"N/A"` and the
/// empty string become [`Cell::Null`]. Categories missing from a column's
/// `allowed_categories` are appended to the returned table's schema and
/// recorded in [`Table::added_categories`]; columns without a category list
/// get the sorted set of observed values.
pub fn load_csv(path: impl AsRef<Path>, schema: &[ColumnSchema]) -> Result<Table> {
    validate_schema(schema)?;
    let mut reader = open(path.as_ref())?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let expected: Vec<String> = schema.iter().map(|c| c.name.clone()).collect();
    if header != expected {
        return Err(Error::HeaderMismatch {
            expected,
            found: header,
        });
    }

    let mut schema = schema.to_vec();
    let mut added = Vec::new();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = line + 1;
        if record.len() != schema.len() {
            return Err(Error::Csv(format!(
                "row {row_no} has {} fields, expected {}",
                record.len(),
                schema.len()
            )));
        }
        let mut row = Vec::with_capacity(schema.len());
        for (col, raw) in schema.iter_mut().zip(record.iter()) {
            row.push(parse_cell(col, raw, row_no, &mut added)?);
        }
        rows.push(row);
    }

    for col in schema.iter_mut().filter(|c| c.kind == ColumnKind::Categorical) {
        if col.allowed_categories.is_none() {
            col.allowed_categories = Some(Vec::new());
        }
    }
    // Columns that came without a list: fill from observations, sorted.
    for (idx, col) in schema.iter_mut().enumerate() {
        if let Some(cats) = col.allowed_categories.as_mut() {
            if cats.is_empty() {
                let mut seen: Vec<String> = rows
                    .iter()
                    .filter_map(|r: &Vec<Cell>| match &r[idx] {
                        Cell::Category(s) => Some(s.clone()),
                        _ => None,
                    })
                    .collect();
                seen.sort();
                seen.dedup();
                *cats = seen;
            }
        }
    }
    Ok(Table::new(schema, rows)?.with_added_categories(added))
}

fn parse_cell(col: &mut ColumnSchema, raw: &str, row: usize, added: &mut Vec<(String, String)>) -> Result<Cell> {
    let unparsable = || Error::UnparsableCell {
        row,
        column: col.name.clone(),
        value: raw.to_owned(),
    };
    if is_null_literal(raw) {
        return Ok(Cell::Null);
    }
    match col.kind {
        ColumnKind::Categorical => {
            if let Some(cats) = col.allowed_categories.as_mut() {
                if !cats.is_empty() && !cats.iter().any(|c| c == raw) {
                    cats.push(raw.to_owned());
                    added.push((col.name.clone(), raw.to_owned()));
                    log::warn!("column `{}`: category {raw:?} not in schema, added", col.name);
                }
            }
            Ok(Cell::Category(raw.to_owned()))
        }
        ColumnKind::Real => {
            let v: f64 = raw.trim().parse().map_err(|_| unparsable())?;
            if !v.is_finite() {
                return Err(unparsable());
            }
            Ok(Cell::Number(v))
        }
        ColumnKind::Integer => {
            let v: f64 = raw.trim().parse().map_err(|_| unparsable())?;
            if !v.is_finite() || v.fract() != 0.0 {
                return Err(unparsable());
            }
            Ok(Cell::Number(v))
        }
        ColumnKind::BinaryTarget => match raw.trim() {
            "0" | "0.0" => Ok(Cell::Number(0.0)),
            "1" | "1.0" => Ok(Cell::Number(1.0)),
            _ => Err(unparsable()),
        },
    }
}

/// Schema-free read: header plus raw string records. Used to re-read the
/// files this crate emits.
pub fn read_records(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = open(path.as_ref())?;
    let header = reader.headers()?.iter().map(str::to_owned).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
    Ok((header, rows))
}
