use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::featsel::{run_selector, tally_votes, vote_table_csv, SelectorVerdict, VoteTally};
use crate::preprocess::{
    correlation_matrix, drop_outliers, find_duplicates, histogram, impute_nulls, normalize_minmax, ImputationPolicy,
    PreprocessReport,
};
use crate::rng::{derive_seed, stream};
use crate::tabular::{label_encode, load_csv, train_test_split, ColumnKind, EncodedMatrix, Table};
use crate::tuning::{pre_split_resample, run_regime, GridResult, RegimeKind, RegimeReport, ResampleMode, RocPoint};

/// How far [`run_stages`] goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Ingest,
    Preprocess,
    SelectFeatures,
    Evaluate,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Preprocess => "preprocess",
            Stage::SelectFeatures => "select-features",
            Stage::Evaluate => "evaluate",
        }
    }
}

/// Where and when a bundle was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub tabforge_version: String,
    pub wall_clock_seconds: f64,
    pub stages: Vec<String>,
}

/// Ingestion summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub columns: usize,
    pub null_counts: Vec<(String, usize)>,
    pub added_categories: Vec<(String, String)>,
}

/// Everything a run produced; `files` lists paths relative to `out_dir`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub out_dir: PathBuf,
    pub ingest: Option<IngestSummary>,
    pub preprocess: Option<PreprocessReport>,
    pub verdicts: Vec<SelectorVerdict>,
    pub tally: Option<VoteTally>,
    pub regimes: Vec<RegimeReport>,
    pub provenance: Provenance,
    pub files: Vec<String>,
}

/// Single writer for everything under the output directory.
struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let failed = dir.join("FAILED");
        if failed.exists() {
            std::fs::remove_file(failed)?;
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, contents)?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_owned());
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `model,accuracy,precision,recall,f1,roc_auc,params,error`, one row per
/// model; failed models have empty metric cells and an error message.
pub fn metrics_csv(report: &RegimeReport) -> Result<String> {
    let rows: Vec<Vec<String>> = report
        .outcomes
        .iter()
        .map(|o| {
            let m = o.metrics.as_ref();
            vec![
                o.model.clone(),
                opt(m.map(|m| m.accuracy)),
                opt(m.map(|m| m.precision)),
                opt(m.map(|m| m.recall)),
                opt(m.map(|m| m.f1)),
                opt(m.and_then(|m| m.roc_auc)),
                o.params.as_ref().map(ToString::to_string).unwrap_or_default(),
                o.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    csv_text(
        &[
            "model",
            "accuracy",
            "precision",
            "recall",
            "f1",
            "roc_auc",
            "params",
            "error",
        ],
        &rows,
    )
}

/// `fpr,tpr,threshold`; the opening point's threshold is written as `inf`.
pub fn roc_csv(points: &[RocPoint]) -> Result<String> {
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| vec![p.fpr.to_string(), p.tpr.to_string(), p.threshold.to_string()])
        .collect();
    csv_text(&["fpr", "tpr", "threshold"], &rows)
}

/// One row per grid cell: parameter values, mean CV accuracy, per-fold
/// accuracies, error.
pub fn grid_csv(grid: &GridResult) -> Result<String> {
    let keys: Vec<String> = grid
        .cells
        .first()
        .map(|c| c.params.iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let k = grid
        .cells
        .iter()
        .filter_map(|c| c.cv.as_ref())
        .map(|cv| cv.fold_accuracies.len())
        .max()
        .unwrap_or(0);
    let mut header: Vec<String> = keys.clone();
    header.push("mean_accuracy".into());
    header.extend((1..=k).map(|f| format!("fold_{f}")));
    header.push("best".into());
    header.push("error".into());
    let rows: Vec<Vec<String>> = grid
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut row: Vec<String> = keys
                .iter()
                .map(|key| c.params.get(key).map(ToString::to_string).unwrap_or_default())
                .collect();
            row.push(opt(c.cv.as_ref().map(|cv| cv.mean)));
            for f in 0..k {
                row.push(opt(c
                    .cv
                    .as_ref()
                    .and_then(|cv| cv.fold_accuracies.get(f).copied().flatten())));
            }
            row.push((i == grid.best_index).to_string());
            row.push(c.error.clone().unwrap_or_default());
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_text(&header, &rows)
}

/// Long-format `model,regime,metric,value` rows over all successful models.
pub fn comparison_csv(reports: &[RegimeReport]) -> Result<String> {
    let mut rows = Vec::new();
    for rep in reports {
        for o in &rep.outcomes {
            let Some(m) = &o.metrics else { continue };
            let values = [
                ("accuracy", Some(m.accuracy)),
                ("precision", Some(m.precision)),
                ("recall", Some(m.recall)),
                ("f1", Some(m.f1)),
                ("roc_auc", m.roc_auc),
            ];
            for (metric, v) in values {
                if let Some(v) = v {
                    rows.push(vec![
                        o.model.clone(),
                        rep.regime.to_string(),
                        metric.to_owned(),
                        v.to_string(),
                    ]);
                }
            }
        }
    }
    csv_text(&["model", "regime", "metric", "value"], &rows)
}

/// Writes the vote table to `path`.
pub fn emit_vote_table(tally: &VoteTally, verdicts: &[SelectorVerdict], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, vote_table_csv(tally, verdicts))?;
    Ok(())
}

struct Run {
    config: RunConfig,
    out: Output,
    started: Instant,
    stages: Vec<String>,
    bundle_ingest: Option<IngestSummary>,
    bundle_pre: Option<PreprocessReport>,
    verdicts: Vec<SelectorVerdict>,
    tally: Option<VoteTally>,
    regimes: Vec<RegimeReport>,
}

impl Run {
    fn ingest(&mut self) -> Result<Table> {
        let table = load_csv(&self.config.data.path, &self.config.schema()?)?;
        let summary = IngestSummary {
            rows: table.n_rows(),
            columns: table.n_columns(),
            null_counts: table
                .schema()
                .iter()
                .enumerate()
                .map(|(j, c)| (c.name.clone(), table.null_count(j)))
                .collect(),
            added_categories: table.added_categories().to_vec(),
        };
        self.out.json("ingest.json", &summary)?;
        self.bundle_ingest = Some(summary);
        Ok(table)
    }

    fn preprocess(&mut self, table: Table) -> Result<EncodedMatrix> {
        let cfg = &self.config.preprocess;
        let mut report = PreprocessReport {
            rows_in: table.n_rows(),
            ..PreprocessReport::default()
        };
        let mut table = table;
        for col in &cfg.impute_mean {
            let (t, n) = impute_nulls(&table, &ImputationPolicy::mean(col))?;
            report.imputed_count.insert(col.clone(), n);
            table = t;
        }
        if let Some(rule) = &cfg.outliers {
            let target = table.target_index()?;
            let (t, dropped) = drop_outliers(&table, rule)?;
            report.dropped_rows = dropped.len();
            report.dropped_positive_rows = dropped
                .iter()
                .filter(|&&i| table.rows()[i][target].as_number() == Some(1.0))
                .count();
            table = t;
        }
        let subset: Vec<&str> = cfg.duplicate_subset.iter().map(String::as_str).collect();
        let dups = find_duplicates(&table, (!subset.is_empty()).then_some(&subset[..]))?;
        report.duplicate_rows = dups.len();
        for col in &cfg.normalize {
            let (t, bounds) = normalize_minmax(&table, col)?;
            report.normalization_bounds.insert(col.clone(), bounds);
            table = t;
        }
        report.rows_out = table.n_rows();
        let bins = cfg.histogram_bins;
        for c in table
            .schema()
            .iter()
            .filter(|c| c.kind == ColumnKind::Real && !c.identifier)
        {
            if let Ok(h) = histogram(&table, &c.name, bins) {
                self.out.write(&format!("hist_{}.csv", c.name), &h.to_csv())?;
            }
        }
        let matrix = label_encode(&table)?;
        self.out
            .write("correlation.csv", &correlation_matrix(&matrix).to_csv())?;
        self.out
            .write("encoding_map.json", &(matrix.encoding_map_json()? + "\n"))?;
        self.out.json("preprocess.json", &report)?;
        self.bundle_pre = Some(report);
        Ok(matrix)
    }

    fn select(&mut self, matrix: &EncodedMatrix) -> Result<EncodedMatrix> {
        let settings = &self.config.selectors;
        let mut verdicts = Vec::with_capacity(settings.enabled.len());
        for &kind in &settings.enabled {
            let v = run_selector(kind, matrix, settings, self.config.run.seed)
                .map_err(|e| Error::InvalidConfig(format!("selector {kind}: {e}")))?;
            verdicts.push(v);
        }
        let tally = tally_votes(&verdicts, self.config.run.min_votes)?;
        self.out.write("votes.csv", &vote_table_csv(&tally, &verdicts))?;
        #[derive(Serialize)]
        struct Votes<'a> {
            tally: &'a VoteTally,
            verdicts: &'a [SelectorVerdict],
        }
        self.out.json(
            "votes.json",
            &Votes {
                tally: &tally,
                verdicts: &verdicts,
            },
        )?;
        if tally.kept.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "no feature reached {} votes",
                self.config.run.min_votes
            )));
        }
        let reduced = matrix.select_features(&tally.kept)?;
        self.verdicts = verdicts;
        self.tally = Some(tally);
        Ok(reduced)
    }

    fn evaluate(&mut self, matrix: &EncodedMatrix, regimes: &[RegimeKind], subdirs: bool) -> Result<()> {
        let seed = self.config.run.seed;
        let ratio = self.config.data.split_ratio;
        let resample = self.config.run.resample;
        let settings = self.config.regime_settings();
        let (data, split) = if resample == ResampleMode::PreSplit {
            pre_split_resample(matrix, ratio, seed)?
        } else {
            let split = train_test_split(&matrix.target, ratio, derive_seed(seed, stream::SPLIT, 0), true)?;
            (matrix.clone(), split)
        };
        for &kind in regimes {
            let regime = crate::tuning::EvaluationRegime { kind, resample };
            let report = run_regime(regime, &data, &split, &self.config.run.models, &settings, seed)?;
            let prefix = if subdirs { format!("{kind}/") } else { String::new() };
            self.out.write(&format!("metrics_{kind}.csv"), &metrics_csv(&report)?)?;
            self.out.json(&format!("{prefix}results_{kind}.json"), &report)?;
            for o in &report.outcomes {
                if !o.roc.is_empty() {
                    self.out
                        .write(&format!("{prefix}roc_{}.csv", o.model), &roc_csv(&o.roc)?)?;
                }
                if let Some(g) = &o.grid {
                    self.out
                        .write(&format!("{prefix}grid_{}.csv", o.model), &grid_csv(g)?)?;
                }
            }
            self.regimes.push(report);
        }
        if subdirs {
            self.out.write("comparison.csv", &comparison_csv(&self.regimes)?)?;
            let missing: Vec<Vec<String>> = self
                .regimes
                .iter()
                .flat_map(|r| {
                    r.outcomes.iter().filter_map(move |o| {
                        o.error
                            .as_ref()
                            .map(|e| vec![o.model.clone(), r.regime.to_string(), e.clone()])
                    })
                })
                .collect();
            self.out.write(
                "comparison_missing.csv",
                &csv_text(&["model", "regime", "reason"], &missing)?,
            )?;
        }
        Ok(())
    }

    fn provenance(&self) -> Result<Provenance> {
        Ok(Provenance {
            config_hash: self.config.hash()?,
            seed: self.config.run.seed,
            tabforge_version: env!("CARGO_PKG_VERSION").to_owned(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            stages: self.stages.clone(),
        })
    }

    fn stage<T>(&mut self, stage: &'static str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        log::info!("stage {stage}");
        let out = f(self).map_err(|e| e.at_stage(stage))?;
        self.stages.push(stage.to_owned());
        Ok(out)
    }

    fn execute(&mut self, upto: Stage, regimes: &[RegimeKind]) -> Result<()> {
        let table = self.stage("ingest", Run::ingest)?;
        if upto == Stage::Ingest {
            return Ok(());
        }
        let matrix = self.stage("preprocess", |r| r.preprocess(table))?;
        if upto == Stage::Preprocess {
            return Ok(());
        }
        let reduced = self.stage("select-features", |r| r.select(&matrix))?;
        if upto == Stage::SelectFeatures {
            return Ok(());
        }
        let subdirs = regimes.len() > 1;
        self.stage("evaluate", |r| r.evaluate(&reduced, regimes, subdirs))
    }
}

/// Runs the pipeline up to and including `upto`, evaluating each of
/// `regimes` on one shared split.
///
/// A stage error aborts the run; files written so far stay in place next
/// to a `FAILED` marker naming the stage and cause, and the error is
/// returned as [`Error::Stage`]. `provenance.json` and `index.json` are
/// written in both cases.
pub fn run_stages(config: &RunConfig, upto: Stage, regimes: &[RegimeKind]) -> Result<ReportBundle> {
    config.validate()?;
    let mut run = Run {
        config: config.clone(),
        out: Output::new(&config.run.out_dir)?,
        started: Instant::now(),
        stages: Vec::new(),
        bundle_ingest: None,
        bundle_pre: None,
        verdicts: Vec::new(),
        tally: None,
        regimes: Vec::new(),
    };
    let result = run.execute(upto, regimes);
    if let Err(e) = &result {
        run.out.write("FAILED", &format!("{e}\n"))?;
    }
    let provenance = run.provenance()?;
    run.out.json("provenance.json", &provenance)?;
    let mut files = run.out.files.clone();
    files.push("index.json".into());
    run.out.json("index.json", &files)?;
    result?;
    Ok(ReportBundle {
        out_dir: config.run.out_dir.clone(),
        ingest: run.bundle_ingest,
        preprocess: run.bundle_pre,
        verdicts: run.verdicts,
        tally: run.tally,
        regimes: run.regimes,
        provenance,
        files,
    })
}

/// The full chain for the configured regime.
pub fn run_pipeline(config: &RunConfig) -> Result<ReportBundle> {
    run_stages(config, Stage::Evaluate, &[config.run.regime])
}

/// All three regimes on one split and seed, plus `comparison.csv`.
/// Per-regime ROC, grid and JSON files go to a subdirectory named after the
/// regime.
pub fn compare_regimes(config: &RunConfig) -> Result<ReportBundle> {
    run_stages(config, Stage::Evaluate, &RegimeKind::ALL)
}

/// Human-readable summary of a bundle.
pub fn summary(bundle: &ReportBundle) -> String {
    let mut s = String::new();
    if let Some(i) = &bundle.ingest {
        let _ = writeln!(s, "ingested {} rows x {} columns", i.rows, i.columns);
    }
    if let Some(p) = &bundle.preprocess {
        let _ = writeln!(
            s,
            "preprocess: {} -> {} rows, imputed {:?}, {} duplicate pairs",
            p.rows_in, p.rows_out, p.imputed_count, p.duplicate_rows
        );
    }
    if let Some(t) = &bundle.tally {
        let _ = writeln!(
            s,
            "kept {} features (>= {} votes): {}",
            t.kept.len(),
            t.min_votes,
            t.kept.join(", ")
        );
    }
    for r in &bundle.regimes {
        let _ = writeln!(
            s,
            "{} ({}), test negatives {:.4}:",
            r.regime, r.resample, r.test_negative_prevalence
        );
        for o in &r.outcomes {
            match (&o.metrics, &o.error) {
                (Some(m), _) => {
                    let _ = writeln!(
                        s,
                        "  {:<14} acc {:.4} prec {:.4} rec {:.4} f1 {:.4} auc {}",
                        o.model,
                        m.accuracy,
                        m.precision,
                        m.recall,
                        m.f1,
                        m.roc_auc.map_or("-".into(), |a| format!("{a:.4}"))
                    );
                }
                (None, Some(e)) => {
                    let _ = writeln!(s, "  {:<14} failed: {e}", o.model);
                }
                _ => {}
            }
        }
        for w in &r.warnings {
            let _ = writeln!(s, "  warning: {w}");
        }
    }
    let _ = writeln!(s, "outputs in {}", bundle.out_dir.display());
    s
}
