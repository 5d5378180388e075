//! Eight feature selectors and the vote tally that fuses their verdicts.
//!
//! Each selector returns a [`SelectorVerdict`]: a keep flag and a score per
//! feature. [`tally_votes`] counts keep flags per feature and keeps features
//! with at least `min_votes` votes.

mod bee;
mod filters;
mod lasso;
mod wrappers;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bee::{mask_fitness, select_bee_colony, BeeColonyConfig};
pub use filters::{chi2_statistic, select_chi2, select_pearson};
pub use lasso::{lasso_coordinate_descent, select_lasso, LassoFit};
pub use wrappers::{select_gbm_importance, select_l1_logistic, select_rf_importance, select_rfe, GbmSelectorConfig};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};
use crate::stats::median;
use crate::tabular::EncodedMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    Pearson,
    Chi2,
    Rfe,
    L1Logistic,
    RfImportance,
    GbmImportance,
    Lasso,
    BeeColony,
}

impl SelectorKind {
    pub const ALL: [SelectorKind; 8] = [
        SelectorKind::Pearson,
        SelectorKind::Chi2,
        SelectorKind::Rfe,
        SelectorKind::L1Logistic,
        SelectorKind::RfImportance,
        SelectorKind::GbmImportance,
        SelectorKind::Lasso,
        SelectorKind::BeeColony,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectorKind::Pearson => "pearson",
            SelectorKind::Chi2 => "chi2",
            SelectorKind::Rfe => "rfe",
            SelectorKind::L1Logistic => "l1_logistic",
            SelectorKind::RfImportance => "rf_importance",
            SelectorKind::GbmImportance => "gbm_importance",
            SelectorKind::Lasso => "lasso",
            SelectorKind::BeeColony => "bee_colony",
        }
    }
}

impl fmt::Display for SelectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SelectorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown selector `{s}`")))
    }
}

/// One selector's decision over every feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectorVerdict {
    pub selector: SelectorKind,
    pub feature_names: Vec<String>,
    pub selected: Vec<bool>,
    /// Correlation, chi-square statistic, elimination rank, |coefficient|,
    /// importance or fitness contribution, depending on the selector.
    pub scores: Vec<f64>,
    /// False when an iterative solver hit its iteration cap.
    #[serde(default = "yes")]
    pub converged: bool,
    /// Best fitness per iteration for the bee colony; empty otherwise.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<f64>,
}

fn yes() -> bool {
    true
}

impl SelectorVerdict {
    pub(crate) fn new(selector: SelectorKind, matrix: &EncodedMatrix, selected: Vec<bool>, scores: Vec<f64>) -> Self {
        Self {
            selector,
            feature_names: matrix.feature_names.clone(),
            selected,
            scores,
            converged: true,
            trace: Vec::new(),
        }
    }

    pub fn selected_names(&self) -> Vec<&str> {
        self.feature_names
            .iter()
            .zip(&self.selected)
            .filter(|(_, &s)| s)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

/// Keep flags for `score >= multiplier * median(scores)`; zero scores are never kept.
pub(crate) fn median_rule(scores: &[f64], multiplier: f64) -> Vec<bool> {
    if scores.is_empty() {
        return Vec::new();
    }
    let cut = multiplier * median(scores);
    scores.iter().map(|&s| s > 0.0 && s >= cut).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRow {
    pub feature: String,
    pub votes: usize,
    pub kept: bool,
}

/// Votes per feature, sorted by votes descending then name ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteTally {
    pub rows: Vec<VoteRow>,
    pub min_votes: usize,
    /// Features kept, in their original column order.
    pub kept: Vec<String>,
}

impl VoteTally {
    pub fn votes(&self, feature: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.feature == feature).map(|r| r.votes)
    }
}

/// Counts keep flags per feature and keeps features with `votes >= min_votes`.
pub fn tally_votes(verdicts: &[SelectorVerdict], min_votes: usize) -> Result<VoteTally> {
    let Some(first) = verdicts.first() else {
        return Ok(VoteTally {
            rows: Vec::new(),
            min_votes,
            kept: Vec::new(),
        });
    };
    let names = &first.feature_names;
    for v in verdicts {
        if &v.feature_names != names || v.selected.len() != names.len() || v.scores.len() != names.len() {
            return Err(Error::VerdictShapeMismatch);
        }
    }
    let votes: Vec<usize> = (0..names.len())
        .map(|j| verdicts.iter().filter(|v| v.selected[j]).count())
        .collect();
    let kept = names
        .iter()
        .zip(&votes)
        .filter(|(_, &v)| v >= min_votes)
        .map(|(n, _)| n.clone())
        .collect();
    let mut rows: Vec<VoteRow> = names
        .iter()
        .zip(&votes)
        .map(|(n, &v)| VoteRow {
            feature: n.clone(),
            votes: v,
            kept: v >= min_votes,
        })
        .collect();
    rows.sort_by(|a, b| b.votes.cmp(&a.votes).then_with(|| a.feature.cmp(&b.feature)));
    Ok(VoteTally { rows, min_votes, kept })
}

/// Feature-by-selector table: `SL,Feature,<selector>...,Total` with
/// `True`/`False` cells, rows in tally order. No verdicts gives a header-only
/// table with just the fixed columns.
pub fn vote_table_csv(tally: &VoteTally, verdicts: &[SelectorVerdict]) -> String {
    let mut out = String::from("SL,Feature");
    for v in verdicts {
        let _ = write!(out, ",{}", v.selector);
    }
    out.push_str(",Total\n");
    for (sl, row) in tally.rows.iter().enumerate() {
        let _ = write!(out, "{},{}", sl + 1, csv_field(&row.feature));
        for v in verdicts {
            let j = v.feature_names.iter().position(|n| *n == row.feature);
            let flag = j.is_some_and(|j| v.selected[j]);
            out.push_str(if flag { ",True" } else { ",False" });
        }
        let _ = writeln!(out, ",{}", row.votes);
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Parameters for running all selectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectorSettings {
    pub enabled: Vec<SelectorKind>,
    pub pearson_threshold: f64,
    pub chi2_alpha: f64,
    pub rfe_n_keep: usize,
    pub rfe_step: usize,
    /// Weight of the L1 penalty against the summed log loss.
    pub l1_lambda: f64,
    pub l1_multiplier: f64,
    pub rf_n_estimators: usize,
    pub rf_multiplier: f64,
    pub gbm: GbmSelectorConfig,
    pub gbm_multiplier: f64,
    pub lasso_alpha: f64,
    pub bee: BeeColonyConfig,
}

impl Default for SelectorSettings {
    fn default() -> Self {
        Self {
            enabled: SelectorKind::ALL.to_vec(),
            pearson_threshold: 0.0,
            chi2_alpha: 0.05,
            rfe_n_keep: 8,
            rfe_step: 10,
            l1_lambda: 1.0,
            l1_multiplier: 1.25,
            rf_n_estimators: 100,
            rf_multiplier: 1.25,
            gbm: GbmSelectorConfig::default(),
            gbm_multiplier: 1.0,
            lasso_alpha: 0.001,
            bee: BeeColonyConfig::default(),
        }
    }
}

/// Runs one selector. Randomized selectors draw their seed from
/// `derive_seed(seed, SELECTOR, position of the kind in SelectorKind::ALL)`.
pub fn run_selector(
    kind: SelectorKind,
    matrix: &EncodedMatrix,
    settings: &SelectorSettings,
    seed: u64,
) -> Result<SelectorVerdict> {
    let idx = SelectorKind::ALL.iter().position(|&k| k == kind).unwrap_or(0) as u64;
    let sub_seed = derive_seed(seed, stream::SELECTOR, idx);
    match kind {
        SelectorKind::Pearson => select_pearson(matrix, settings.pearson_threshold),
        SelectorKind::Chi2 => select_chi2(matrix, settings.chi2_alpha),
        SelectorKind::Rfe => select_rfe(matrix, settings.rfe_n_keep, settings.rfe_step),
        SelectorKind::L1Logistic => select_l1_logistic(matrix, settings.l1_lambda, settings.l1_multiplier),
        SelectorKind::RfImportance => {
            select_rf_importance(matrix, settings.rf_n_estimators, settings.rf_multiplier, sub_seed)
        }
        SelectorKind::GbmImportance => select_gbm_importance(matrix, &settings.gbm, settings.gbm_multiplier, sub_seed),
        SelectorKind::Lasso => select_lasso(matrix, settings.lasso_alpha),
        SelectorKind::BeeColony => select_bee_colony(
            matrix,
            &BeeColonyConfig {
                seed: settings.bee.seed.or(Some(sub_seed)),
                ..settings.bee.clone()
            },
        ),
    }
}
