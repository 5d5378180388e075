use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Integer,
    Real,
    Categorical,
    BinaryTarget,
}

impl ColumnKind {
    pub fn is_numeric(self) -> bool {
        !matches!(self, ColumnKind::Categorical)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_categories: Option<Vec<String>>,
    /// Row identifiers are carried through ingestion but never become features.
    #[serde(default)]
    pub identifier: bool,
}

impl ColumnSchema {
    pub fn new(name: &str, kind: ColumnKind) -> Self {
        Self {
            name: name.to_owned(),
            kind,
            allowed_categories: None,
            identifier: false,
        }
    }

    pub fn categorical(name: &str, categories: &[&str]) -> Self {
        Self {
            allowed_categories: Some(categories.iter().map(|c| (*c).to_owned()).collect()),
            ..Self::new(name, ColumnKind::Categorical)
        }
    }

    pub fn identifier(mut self) -> Self {
        self.identifier = true;
        self
    }
}

/// Exactly one binary-target column and unique names.
pub fn validate_schema(schema: &[ColumnSchema]) -> Result<()> {
    let targets = schema.iter().filter(|c| c.kind == ColumnKind::BinaryTarget).count();
    match targets {
        0 => return Err(Error::NoTargetColumn),
        1 => {}
        n => {
            return Err(Error::InvalidSchema(format!(
                "{n} binary-target columns, expected exactly one"
            )))
        }
    }
    for (i, col) in schema.iter().enumerate() {
        if schema[..i].iter().any(|c| c.name == col.name) {
            return Err(Error::InvalidSchema(format!("duplicate column `{}`", col.name)));
        }
        if col.kind != ColumnKind::Categorical && col.allowed_categories.is_some() {
            return Err(Error::InvalidSchema(format!(
                "non-categorical column `{}` lists categories",
                col.name
            )));
        }
    }
    Ok(())
}

/// The twelve columns of the public stroke-prediction CSV, in file order.
pub fn stroke_schema() -> Vec<ColumnSchema> {
    use ColumnKind::*;
    vec![
        ColumnSchema::new("id", Integer).identifier(),
        ColumnSchema::categorical("gender", &["Female", "Male", "Other"]),
        ColumnSchema::new("age", Real),
        ColumnSchema::new("hypertension", Integer),
        ColumnSchema::new("heart_disease", Integer),
        ColumnSchema::categorical("ever_married", &["No", "Yes"]),
        ColumnSchema::categorical(
            "work_type",
            &["Govt_job", "Never_worked", "Private", "Self-employed", "children"],
        ),
        ColumnSchema::categorical("Residence_type", &["Rural", "Urban"]),
        ColumnSchema::new("avg_glucose_level", Real),
        ColumnSchema::new("bmi", Real),
        ColumnSchema::categorical(
            "smoking_status",
            &["Unknown", "formerly smoked", "never smoked", "smokes"],
        ),
        ColumnSchema::new("stroke", BinaryTarget),
    ]
}
