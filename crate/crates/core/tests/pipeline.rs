use std::collections::BTreeMap;
use std::path::Path;

use tabforge::models::{default_params, ModelKind, ParamValue};
use tabforge::preprocess::normalize_minmax;
use tabforge::report::{compare_regimes, run_pipeline, run_stages, RunConfig, Stage};
use tabforge::tabular::{read_records, synthetic_stroke_csv, Cell, ColumnKind, ColumnSchema, Table};
use tabforge::tuning::RegimeKind;
use tabforge::Error;

fn config(dir: &Path, rows: usize) -> RunConfig {
    let data = dir.join("synthetic.csv");
    std::fs::write(&data, synthetic_stroke_csv(rows, 3)).unwrap();
    let mut cfg = RunConfig::default();
    cfg.data.path = data;
    cfg.run.out_dir = dir.join("out");
    cfg
}

/// One-cell grids: the first default parameter of each model, alone.
fn tiny_grids(cfg: &mut RunConfig) {
    for kind in ModelKind::ALL {
        let (name, value) = default_params(kind)
            .iter()
            .next()
            .map(|(k, v)| (k.clone(), v.clone()))
            .unwrap();
        cfg.grids.insert(kind, BTreeMap::from([(name, vec![value])]));
    }
}

#[test]
fn minmax_matches_hand_formula_on_50_by_3() {
    let schema = vec![
        ColumnSchema::new("a", ColumnKind::Real),
        ColumnSchema::new("b", ColumnKind::Real),
        ColumnSchema::new("c", ColumnKind::Real),
        ColumnSchema::new("y", ColumnKind::BinaryTarget),
    ];
    let raw: Vec<[f64; 3]> = (0..50)
        .map(|i| {
            let t = i as f64;
            [t * 1.5 - 20.0, (t * 7.0) % 13.0, 4.0]
        })
        .collect();
    let rows = raw
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Cell> = r.iter().map(|&v| Cell::Number(v)).collect();
            row.push(Cell::Number((i % 2) as f64));
            row
        })
        .collect();
    let mut table = Table::new(schema, rows).unwrap();
    for (j, name) in ["a", "b", "c"].iter().enumerate() {
        let (t, (lo, hi)) = normalize_minmax(&table, name).unwrap();
        let col: Vec<f64> = raw.iter().map(|r| r[j]).collect();
        let want_lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let want_hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((lo, hi), (want_lo, want_hi));
        for (i, v) in t.column(j).enumerate() {
            let want = if want_hi > want_lo {
                (col[i] - want_lo) / (want_hi - want_lo)
            } else {
                0.0
            };
            assert!((v.as_number().unwrap() - want).abs() < 1e-12);
        }
        table = t;
    }
}

#[test]
fn run_all_is_byte_deterministic_and_every_csv_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), 300);
    cfg.run.regime = RegimeKind::NoCvNoGrid;
    let first = run_pipeline(&cfg).unwrap();
    let snapshot = |names: &[&str]| -> Vec<Vec<u8>> {
        names
            .iter()
            .map(|n| std::fs::read(cfg.run.out_dir.join(n)).unwrap())
            .collect()
    };
    let watched = [
        "metrics_no_cv_no_grid.csv",
        "votes.csv",
        "votes.json",
        "correlation.csv",
    ];
    let before = snapshot(&watched);
    let second = run_pipeline(&cfg).unwrap();
    assert_eq!(before, snapshot(&watched));
    assert_eq!(first.files, second.files);
    assert_eq!(first.provenance.config_hash, second.provenance.config_hash);

    assert!(!cfg.run.out_dir.join("FAILED").exists());
    let csvs: Vec<&String> = first.files.iter().filter(|f| f.ends_with(".csv")).collect();
    assert!(csvs.len() >= 5);
    for f in csvs {
        let (header, rows) = read_records(cfg.run.out_dir.join(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        assert!(!header.is_empty(), "{f}");
        assert!(rows.iter().all(|r| r.len() == header.len()), "{f}");
    }
    for f in &first.files {
        assert!(cfg.run.out_dir.join(f).is_file(), "{f} listed but missing");
    }
}

#[test]
fn vote_table_totals_recount_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), 300);
    let bundle = run_stages(&cfg, Stage::SelectFeatures, &[cfg.run.regime]).unwrap();
    let (header, rows) = read_records(cfg.run.out_dir.join("votes.csv")).unwrap();
    assert_eq!(header.first().map(String::as_str), Some("SL"));
    assert_eq!(header.last().map(String::as_str), Some("Total"));
    assert_eq!(header.len(), 3 + bundle.verdicts.len());
    let tally = bundle.tally.unwrap();
    let mut previous = usize::MAX;
    for row in &rows {
        let flags = &row[2..row.len() - 1];
        let recount = flags.iter().filter(|f| *f == "True").count();
        let total: usize = row.last().unwrap().parse().unwrap();
        assert_eq!(recount, total, "row {row:?}");
        assert!(total <= previous);
        previous = total;
        assert_eq!(tally.kept.contains(&row[1]), total >= cfg.run.min_votes);
    }
    assert!(!cfg.run.out_dir.join("metrics_cv_with_grid.csv").exists());
}

#[test]
fn stage_failure_leaves_failed_marker() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), 50);
    std::fs::write(&cfg.data.path, "id,sex\n1,M\n").unwrap();
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, Error::Stage { stage: "ingest", .. }), "{err}");
    let marker = std::fs::read_to_string(cfg.run.out_dir.join("FAILED")).unwrap();
    assert!(marker.contains("ingest"));
    assert!(cfg.run.out_dir.join("provenance.json").is_file());

    // A later successful run clears the marker.
    cfg = config(dir.path(), 300);
    cfg.run.regime = RegimeKind::NoCvNoGrid;
    run_pipeline(&cfg).unwrap();
    assert!(!cfg.run.out_dir.join("FAILED").exists());
}

#[test]
fn compare_regimes_emits_five_metrics_per_model_and_regime() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), 300);
    tiny_grids(&mut cfg);
    cfg.run.k = 3;
    let bundle = compare_regimes(&cfg).unwrap();
    assert_eq!(bundle.regimes.len(), 3);
    let (header, rows) = read_records(cfg.run.out_dir.join("comparison.csv")).unwrap();
    assert_eq!(header, ["model", "regime", "metric", "value"]);
    let (_, missing) = read_records(cfg.run.out_dir.join("comparison_missing.csv")).unwrap();
    assert_eq!(rows.len() + 5 * missing.len(), 3 * ModelKind::ALL.len() * 5);
    for regime in RegimeKind::ALL {
        assert!(cfg.run.out_dir.join(format!("metrics_{regime}.csv")).is_file());
        assert!(cfg
            .run
            .out_dir
            .join(format!("{regime}/results_{regime}.json"))
            .is_file());
    }
    for r in rows {
        let v: f64 = r[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn validation_rejects_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), 50);
    cfg.run.min_votes = 9;
    assert!(matches!(run_pipeline(&cfg), Err(Error::InvalidConfig(_))));
    assert!(!cfg.run.out_dir.exists());
    cfg.run.min_votes = 4;
    cfg.grids.insert(
        ModelKind::Knn,
        BTreeMap::from([("n_neighbours".to_owned(), vec![ParamValue::Int(3)])]),
    );
    assert!(run_pipeline(&cfg).is_err());
}
