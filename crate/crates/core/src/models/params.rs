use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelKind;
use crate::error::{Error, Result};

/// One hyperparameter value. Serializes untagged: `null`, booleans, integers,
/// floats, strings and float lists map onto their JSON/TOML counterparts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    None,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    FloatList(Vec<f64>),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            ParamValue::Int(v) => Some(v as f64),
            ParamValue::Float(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self {
            ParamValue::Int(v) => Some(v),
            ParamValue::Float(v) if v.fract() == 0.0 && v.abs() < 1e15 => Some(v as i64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, ParamValue::None)
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::None => f.write_str("None"),
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Str(s) => f.write_str(s),
            ParamValue::FloatList(v) => {
                f.write_str("[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}
impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}
impl From<i32> for ParamValue {
    fn from(v: i32) -> Self {
        ParamValue::Int(v.into())
    }
}
impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}
impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}
impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_owned())
    }
}
impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Str(v)
    }
}
impl From<Vec<f64>> for ParamValue {
    fn from(v: Vec<f64>) -> Self {
        ParamValue::FloatList(v)
    }
}
impl<T: Into<ParamValue>> From<Option<T>> for ParamValue {
    fn from(v: Option<T>) -> Self {
        v.map_or(ParamValue::None, Into::into)
    }
}

/// Name to value map. Keys absent from the map take each model's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HyperParams(BTreeMap<String, ParamValue>);

impl HyperParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: impl Into<ParamValue>) -> Self {
        self.insert(name, value);
        self
    }

    pub fn insert(&mut self, name: &str, value: impl Into<ParamValue>) {
        self.0.insert(name.to_owned(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ParamValue)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` overlaid on `base`: keys present here win.
    pub fn merged_over(&self, base: &HyperParams) -> HyperParams {
        let mut out = base.clone();
        for (k, v) in &self.0 {
            out.0.insert(k.clone(), v.clone());
        }
        out
    }

    pub(crate) fn float(&self, name: &str, default: f64) -> f64 {
        self.get(name).and_then(ParamValue::as_f64).unwrap_or(default)
    }

    pub(crate) fn usize(&self, name: &str, default: usize) -> usize {
        self.get(name)
            .and_then(ParamValue::as_int)
            .map_or(default, |v| v as usize)
    }

    /// `None` when the key is absent or explicitly `None`.
    pub(crate) fn opt_usize(&self, name: &str) -> Option<usize> {
        self.get(name).and_then(ParamValue::as_int).map(|v| v as usize)
    }

    pub(crate) fn flag(&self, name: &str, default: bool) -> bool {
        match self.get(name) {
            Some(ParamValue::Bool(b)) => *b,
            _ => default,
        }
    }

    pub(crate) fn choice<'a>(&'a self, name: &str, default: &'a str) -> &'a str {
        self.get(name).and_then(ParamValue::as_str).unwrap_or(default)
    }
}

impl fmt::Display for HyperParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl FromIterator<(String, ParamValue)> for HyperParams {
    fn from_iter<I: IntoIterator<Item = (String, ParamValue)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[derive(Clone, Copy, Debug)]
enum Ty {
    /// Integer `>= min`.
    Int(i64),
    /// `None` or integer `>= min`.
    OptInt(i64),
    /// Real `> min` (strict) or `>= min`.
    Float {
        min: f64,
        strict: bool,
    },
    /// Real in `(0, 1]`.
    Fraction,
    Bool,
    Choice(&'static [&'static str]),
    OptChoice(&'static [&'static str]),
    /// A named choice or a positive real.
    ChoiceOrPositive(&'static [&'static str]),
    /// `None` or a length-2 probability vector.
    Priors,
}

const CRITERIA: &[&str] = &["gini", "entropy"];

fn spec(kind: ModelKind) -> &'static [(&'static str, Ty)] {
    use Ty::*;
    const NONNEG: Ty = Float {
        min: 0.0,
        strict: false,
    };
    const POS: Ty = Float { min: 0.0, strict: true };
    match kind {
        ModelKind::Linear => &[("fit_intercept", Bool), ("copy_X", Bool)],
        ModelKind::Logistic => &[("penalty", Choice(&["l1", "l2"])), ("C", POS), ("max_iter", Int(1))],
        ModelKind::DecisionTree => &[
            ("criterion", Choice(CRITERIA)),
            ("max_depth", OptInt(1)),
            ("min_samples_split", Int(2)),
            ("min_samples_leaf", Int(1)),
        ],
        ModelKind::RandomForest => &[
            ("n_estimators", Int(1)),
            ("criterion", Choice(CRITERIA)),
            ("max_depth", OptInt(1)),
            ("min_samples_split", Int(2)),
            ("min_samples_leaf", Int(1)),
            ("max_features", Choice(&["sqrt", "all"])),
            ("bootstrap", Bool),
        ],
        ModelKind::AdaboostR => &[("n_estimators", Int(1)), ("learning_rate", POS)],
        ModelKind::Knn => &[
            ("n_neighbors", Int(1)),
            ("weights", Choice(&["uniform", "distance"])),
            ("p", Choice(&["1", "2"])),
        ],
        ModelKind::GaussianNb => &[("var_smoothing", NONNEG), ("priors", Priors)],
        ModelKind::SvmLinear => &[
            ("C", POS),
            ("gamma", ChoiceOrPositive(&["scale", "auto"])),
            ("class_weight", OptChoice(&["balanced"])),
            ("max_iter", Int(1)),
        ],
        ModelKind::XgboostLike => &[
            ("n_estimators", Int(0)),
            ("max_depth", OptInt(1)),
            ("learning_rate", POS),
            ("min_child_weight", NONNEG),
            ("alpha", NONNEG),
            ("lambda", NONNEG),
            ("gamma", NONNEG),
            ("colsample_bytree", Fraction),
            ("objective", Choice(&["binary:logistic", "reg:squarederror"])),
            ("grow_policy", Choice(&["depthwise", "lossguide"])),
            ("num_leaves", Int(2)),
        ],
    }
}

fn describe(ty: Ty) -> String {
    match ty {
        Ty::Int(min) => format!("integer >= {min}"),
        Ty::OptInt(min) => format!("None or integer >= {min}"),
        Ty::Float { min, strict: true } => format!("number > {min}"),
        Ty::Float { min, strict: false } => format!("number >= {min}"),
        Ty::Fraction => "number in (0, 1]".into(),
        Ty::Bool => "boolean".into(),
        Ty::Choice(c) => format!("one of {c:?}"),
        Ty::OptChoice(c) => format!("None or one of {c:?}"),
        Ty::ChoiceOrPositive(c) => format!("positive number or one of {c:?}"),
        Ty::Priors => "None or two non-negative numbers summing to 1".into(),
    }
}

fn accepts(ty: Ty, v: &ParamValue) -> bool {
    let int_ok = |min: i64| v.as_int().is_some_and(|x| x >= min);
    let choice_ok = |c: &[&str]| match v {
        ParamValue::Str(s) => c.contains(&s.as_str()),
        ParamValue::Int(i) => c.contains(&i.to_string().as_str()),
        _ => false,
    };
    match ty {
        Ty::Int(min) => int_ok(min),
        Ty::OptInt(min) => v.is_none() || int_ok(min),
        Ty::Float { min, strict } => v
            .as_f64()
            .is_some_and(|x| x.is_finite() && if strict { x > min } else { x >= min }),
        Ty::Fraction => v.as_f64().is_some_and(|x| x > 0.0 && x <= 1.0),
        Ty::Bool => matches!(v, ParamValue::Bool(_)),
        Ty::Choice(c) => choice_ok(c),
        Ty::OptChoice(c) => v.is_none() || choice_ok(c),
        Ty::ChoiceOrPositive(c) => choice_ok(c) || v.as_f64().is_some_and(|x| x > 0.0 && x.is_finite()),
        Ty::Priors => match v {
            ParamValue::None => true,
            ParamValue::FloatList(p) => {
                p.len() == 2
                    && p.iter().all(|x| *x >= 0.0 && x.is_finite())
                    && (p.iter().sum::<f64>() - 1.0).abs() < 1e-9
            }
            _ => false,
        },
    }
}

/// Names accepted by `kind`, in declaration order.
pub fn param_names(kind: ModelKind) -> Vec<&'static str> {
    spec(kind).iter().map(|(n, _)| *n).collect()
}

/// Rejects unknown keys and out-of-range values.
pub fn validate(kind: ModelKind, params: &HyperParams) -> Result<()> {
    let table = spec(kind);
    for (name, value) in params.iter() {
        let Some((_, ty)) = table.iter().find(|(n, _)| n == name) else {
            let known: Vec<_> = table.iter().map(|(n, _)| *n).collect();
            return Err(Error::param(name, value, &format!("a parameter of {kind}: {known:?}")));
        };
        if !accepts(*ty, value) {
            return Err(Error::param(name, value, &describe(*ty)));
        }
    }
    Ok(())
}
