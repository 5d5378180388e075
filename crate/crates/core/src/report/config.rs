use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::featsel::SelectorSettings;
use crate::models::{validate, HyperParams, ModelKind, ParamValue};
use crate::preprocess::OutlierRule;
use crate::tabular::{stroke_schema, validate_schema, ColumnSchema};
use crate::tuning::{EvaluationRegime, GridSpec, RegimeKind, RegimeSettings, ResampleMode};

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "TABFORGE_SEED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub path: PathBuf,
    /// `"stroke"` for the built-in schema, otherwise a path to a JSON list
    /// of column schemas.
    pub schema: String,
    pub split_ratio: f64,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            path: PathBuf::from("data/healthcare-dataset-stroke-data.csv"),
            schema: "stroke".into(),
            split_ratio: 0.8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub regime: RegimeKind,
    pub resample: ResampleMode,
    pub k: usize,
    pub stratified: bool,
    pub min_votes: usize,
    pub models: Vec<ModelKind>,
    pub out_dir: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 42,
            regime: RegimeKind::CvWithGrid,
            resample: ResampleMode::FoldSafe,
            k: 5,
            stratified: true,
            min_votes: 4,
            models: ModelKind::ALL.to_vec(),
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSection {
    /// Columns whose nulls are filled with the column mean.
    pub impute_mean: Vec<String>,
    /// Rows outside the rule's bounds are dropped; `None` (written `"none"`)
    /// skips the step.
    #[serde(with = "optional_rule")]
    pub outliers: Option<OutlierRule>,
    /// Columns rescaled to `[0, 1]`.
    pub normalize: Vec<String>,
    /// Columns compared by the duplicate scan; empty means all.
    pub duplicate_subset: Vec<String>,
    /// Bins for the emitted histograms of numeric columns.
    pub histogram_bins: usize,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        Self {
            impute_mean: vec!["bmi".into()],
            outliers: Some(OutlierRule::stroke_bmi()),
            normalize: vec!["age".into()],
            duplicate_subset: Vec::new(),
            histogram_bins: 20,
        }
    }
}

/// Everything one pipeline run depends on.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSection,
    pub run: RunSection,
    pub preprocess: PreprocessSection,
    pub selectors: SelectorSettings,
    /// Replacement search spaces, per model kind.
    pub grids: BTreeMap<ModelKind, BTreeMap<String, Vec<ParamValue>>>,
    /// Overrides of the untuned parameters, per model kind.
    pub defaults: BTreeMap<ModelKind, HyperParams>,
}

/// `outliers = "none"` or an inline rule table.
mod optional_rule {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::preprocess::OutlierRule;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Rule(OutlierRule),
        Word(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<OutlierRule>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(rule) => rule.serialize(s),
            None => s.serialize_str("none"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<OutlierRule>, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Rule(rule) => Ok(Some(rule)),
            Repr::Word(w) if w.eq_ignore_ascii_case("none") => Ok(None),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "outliers must be a rule table or \"none\", got {w:?}"
            ))),
        }
    }
}

/// `ParamValue::None` back to its TOML spelling.
fn none_word(v: &ParamValue) -> ParamValue {
    if v.is_none() {
        ParamValue::Str("None".into())
    } else {
        v.clone()
    }
}

/// TOML has no null, so the strings `"None"` and `"none"` stand for it.
fn none_literal(v: ParamValue) -> ParamValue {
    match v {
        ParamValue::Str(s) if s == "None" || s == "none" => ParamValue::None,
        other => other,
    }
}

impl RunConfig {
    /// Parses TOML. Relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        for grid in cfg.grids.values_mut() {
            for vals in grid.values_mut() {
                *vals = vals.drain(..).map(none_literal).collect();
            }
        }
        for params in cfg.defaults.values_mut() {
            *params = params
                .iter()
                .map(|(k, v)| (k.clone(), none_literal(v.clone())))
                .collect();
        }
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        rebase(&mut cfg.data.path);
        rebase(&mut cfg.run.out_dir);
        if cfg.data.schema != "stroke" {
            let mut p = PathBuf::from(&cfg.data.schema);
            rebase(&mut p);
            cfg.data.schema = p.to_string_lossy().into_owned();
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base)
    }

    /// TOML text that [`RunConfig::from_toml_str`] reads back to an equal
    /// value (paths aside, which are printed as resolved).
    pub fn to_toml_string(&self) -> Result<String> {
        let mut printable = self.clone();
        for grid in printable.grids.values_mut() {
            for vals in grid.values_mut() {
                *vals = vals.iter().map(none_word).collect();
            }
        }
        for params in printable.defaults.values_mut() {
            *params = params.iter().map(|(k, v)| (k.clone(), none_word(v))).collect();
        }
        toml::to_string(&printable).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Replaces the seed with `TABFORGE_SEED` when that variable is set.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        if let Ok(raw) = std::env::var(SEED_ENV) {
            self.run.seed = raw
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("{SEED_ENV}={raw:?} is not a u64")))?;
        }
        Ok(())
    }

    pub fn regime(&self) -> EvaluationRegime {
        EvaluationRegime {
            kind: self.run.regime,
            resample: self.run.resample,
        }
    }

    pub fn schema(&self) -> Result<Vec<ColumnSchema>> {
        if self.data.schema == "stroke" {
            return Ok(stroke_schema());
        }
        let path = Path::new(&self.data.schema);
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let schema: Vec<ColumnSchema> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        validate_schema(&schema)?;
        Ok(schema)
    }

    pub fn regime_settings(&self) -> RegimeSettings {
        RegimeSettings {
            k: self.run.k,
            stratified: self.run.stratified,
            grids: self
                .grids
                .iter()
                .map(|(&kind, values)| {
                    (
                        kind,
                        GridSpec {
                            kind,
                            values: values.clone(),
                        },
                    )
                })
                .collect(),
            defaults: self.defaults.clone(),
        }
    }

    /// Checks every invariant that can be checked without running the
    /// pipeline: the dataset and schema exist, `min_votes` is at most the
    /// number of enabled selectors, and all numeric knobs are in range.
    pub fn validate(&self) -> Result<()> {
        if !self.data.path.is_file() {
            return Err(Error::MissingFile(self.data.path.clone()));
        }
        self.schema()?;
        let r = self.data.split_ratio;
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidConfig(format!("split_ratio must be in (0, 1), got {r}")));
        }
        let enabled = self.selectors.enabled.len();
        if self.run.min_votes > enabled {
            return Err(Error::InvalidConfig(format!(
                "min_votes = {} exceeds the {enabled} enabled selectors",
                self.run.min_votes
            )));
        }
        let mut seen = self.selectors.enabled.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != enabled {
            return Err(Error::InvalidConfig("a selector is enabled twice".into()));
        }
        if self.run.k < 2 {
            return Err(Error::InvalidConfig(format!(
                "k must be at least 2, got {}",
                self.run.k
            )));
        }
        if self.run.models.is_empty() {
            return Err(Error::InvalidConfig("no models configured".into()));
        }
        if self.preprocess.histogram_bins == 0 {
            return Err(Error::ZeroBins);
        }
        if let Some(rule) = &self.preprocess.outliers {
            OutlierRule::new(&rule.column, rule.lower_bound, rule.upper_bound)?;
        }
        self.selectors.gbm.validate()?;
        self.selectors.bee.validate()?;
        let settings = self.regime_settings();
        for grid in settings.grids.values() {
            grid.validate()?;
        }
        for (&kind, params) in &self.defaults {
            validate(kind, params)?;
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form of the configuration with the
    /// output directory blanked, so only settings that affect results count.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.run.out_dir = PathBuf::new();
        let digest = Sha256::digest(serde_json::to_vec(&c)?);
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}
