//! Acceptance checks 1-12. Each prints one PASS/FAIL line.
//!
//! Checks 1, 10 and 11 need the public stroke CSV, located through
//! `TABFORGE_STROKE_CSV` or `data/healthcare-dataset-stroke-data.csv` at the
//! workspace root. Without it they print FAIL with "dataset unavailable"; the
//! test binary only fails on checks that could run and did not pass.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng as _;
use tabforge::featsel::{lasso_coordinate_descent, tally_votes, SelectorKind, SelectorVerdict};
use tabforge::models::{
    default_params, fit, fit_logistic, Booster, BoosterConfig, GaussianNb, GrowPolicy, HyperParams, LinearRegression,
    LogisticObjective, ModelKind, Objective, ParamValue, Penalty,
};
use tabforge::preprocess::{find_duplicates, impute_nulls, ImputationPolicy};
use tabforge::report::{run_pipeline, RunConfig};
use tabforge::rng::{derive_seed, rng, stream};
use tabforge::tabular::{load_csv, stroke_schema, synthetic_stroke_csv, train_test_split, EncodedMatrix};
use tabforge::tuning::{
    grid_search, kfold_plan, metrics, roc_auc, ConfusionMatrix, GridSpec, ModelOutcome, RegimeKind, RegimeReport,
    ResampleMode,
};
use tabforge::Matrix;

enum Outcome {
    Pass(String),
    Fail(String),
    Unavailable(String),
}

type Check = fn() -> Outcome;

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome::Pass(detail.into())
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome::Fail(detail.into())
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn stroke_csv() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("TABFORGE_STROKE_CSV") {
        let p = PathBuf::from(p);
        return p.is_file().then_some(p);
    }
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/healthcare-dataset-stroke-data.csv");
    p.is_file().then_some(p)
}

fn unavailable() -> Outcome {
    Outcome::Unavailable(
        "dataset unavailable: set TABFORGE_STROKE_CSV or add data/healthcare-dataset-stroke-data.csv".into(),
    )
}

fn encoded(columns: Vec<Vec<f64>>, target: Vec<u8>) -> EncodedMatrix {
    let names = (0..columns.len()).map(|j| format!("f{j}")).collect();
    EncodedMatrix::new(Matrix::from_columns(&columns).unwrap(), target, names).unwrap()
}

fn random_binary_problem(n: usize, m: usize, seed: u64) -> EncodedMatrix {
    let mut r = rng(seed);
    let mut cols = vec![Vec::with_capacity(n); m];
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = 0.0;
        for (j, c) in cols.iter_mut().enumerate() {
            let v: f64 = r.random_range(-2.0..2.0);
            if j < 2 {
                z += v;
            }
            c.push(v);
        }
        // Both classes always present.
        let label = if i < 2 {
            i as u8
        } else {
            u8::from(z + r.random_range(-1.0..1.0) > 0.0)
        };
        y.push(label);
    }
    encoded(cols, y)
}

fn c01_ingestion() -> Outcome {
    let Some(path) = stroke_csv() else {
        return unavailable();
    };
    let t = Instant::now();
    let table = match load_csv(&path, &stroke_schema()) {
        Ok(t) => t,
        Err(e) => return fail(format!("load failed: {e}")),
    };
    let (imputed, filled) = impute_nulls(&table, &ImputationPolicy::mean("bmi")).unwrap();
    let dups = find_duplicates(&imputed, None).unwrap();
    let elapsed = t.elapsed();
    verdict(
        table.n_rows() == 5110
            && table.n_columns() == 12
            && filled == 201
            && dups.is_empty()
            && elapsed < Duration::from_secs(5),
        format!(
            "rows {} cols {} bmi filled {} duplicate pairs {} in {:.2}s",
            table.n_rows(),
            table.n_columns(),
            filled,
            dups.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn c02_split() -> Outcome {
    // Any 5110-row binary target; the arithmetic does not depend on content.
    let csv = synthetic_stroke_csv(5110, 1);
    let target: Vec<u8> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    let mut sizes = Vec::new();
    for stratified in [true, false] {
        let s = train_test_split(&target, 0.8, 42, stratified).unwrap();
        sizes.push((s.train.len(), s.test.len()));
    }
    verdict(
        target.len() == 5110 && sizes.iter().all(|&s| s == (4088, 1022)),
        format!("n {} (train, test) stratified/plain {:?}", target.len(), sizes),
    )
}

fn c03_vote_tally() -> Outcome {
    const FEATURES: [&str; 10] = [
        "Age",
        "AvgGlucose",
        "WorkType",
        "Hypertension",
        "HeartDisease",
        "Smoking",
        "EverMarried",
        "BMI",
        "Residence",
        "Gender",
    ];
    let rows: [&str; 10] = [
        "TTTTTTTT", "TTTTTTTF", "TTTTFFTT", "TTTTFFTF", "TTTTFFTF", "TTTFTFFF", "TTTFFFTF", "TFFFTTFF", "TTTFFFFF",
        "TFFFFFFF",
    ];
    let t = Instant::now();
    let verdicts: Vec<SelectorVerdict> = SelectorKind::ALL
        .iter()
        .enumerate()
        .map(|(s, &selector)| SelectorVerdict {
            selector,
            feature_names: FEATURES.iter().map(|f| f.to_string()).collect(),
            selected: rows.iter().map(|r| r.as_bytes()[s] == b'T').collect(),
            scores: vec![0.0; 10],
            converged: true,
            trace: Vec::new(),
        })
        .collect();
    let tally = tally_votes(&verdicts, 4).unwrap();
    let totals: Vec<usize> = FEATURES.iter().map(|f| tally.votes(f).unwrap()).collect();
    let elapsed = t.elapsed();
    verdict(
        totals == [8, 7, 6, 5, 5, 4, 4, 3, 3, 1] && tally.kept == FEATURES[..7] && elapsed < Duration::from_secs(1),
        format!("totals {totals:?} kept {:?}", tally.kept),
    )
}

fn c04_metrics() -> Outcome {
    let cm = ConfusionMatrix {
        tp: 50,
        fp: 10,
        fn_: 5,
        tn: 35,
    };
    let m = metrics(&cm).unwrap();
    let precision = 50.0 / 60.0;
    let recall = 50.0 / 55.0;
    let want = [0.85, precision, recall, 2.0 * precision * recall / (precision + recall)];
    let got = [m.accuracy, m.precision, m.recall, m.f1];
    let printed = [0.85, 0.833333, 0.909091, 0.869565];
    let ok = got.iter().zip(&want).all(|(g, w)| (g - w).abs() < 1e-6)
        && got.iter().zip(&printed).all(|(g, p)| (g - p).abs() < 1e-6);
    verdict(ok, format!("acc/prec/rec/f1 {got:.6?}"))
}

fn mann_whitney(y: &[u8], s: &[f64]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &yi) in y.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            if yi == 1 && yj == 0 {
                pairs += 1.0;
                if s[i] > s[j] {
                    wins += 1.0;
                } else if s[i] == s[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

fn c05_roc() -> Outcome {
    let mut r = rng(5);
    let y: Vec<u8> = (0..500)
        .map(|i| if i < 2 { i as u8 } else { r.random_range(0..2) })
        .collect();
    // Coarse scores so that ties occur.
    let s: Vec<f64> = y
        .iter()
        .map(|&l| (f64::from(l) * 0.3 + r.random_range(0.0..1.0) * 20.0).round() / 20.0)
        .collect();
    let auc = roc_auc(&y, &s).unwrap();
    let oracle = mann_whitney(&y, &s);
    let perfect: Vec<f64> = y.iter().map(|&l| f64::from(l)).collect();
    let auc_perfect = roc_auc(&y, &perfect).unwrap();
    let auc_constant = roc_auc(&y, &vec![0.3; y.len()]).unwrap();
    verdict(
        (auc - oracle).abs() < 1e-9 && auc_perfect == 1.0 && auc_constant == 0.5,
        format!("auc {auc:.12} oracle {oracle:.12} perfect {auc_perfect} constant {auc_constant}"),
    )
}

fn knn_oracle(train: &Matrix, y: &[u8], query: &[f64], k: usize, p: u8, distance_weights: bool) -> u8 {
    let mut d: Vec<(f64, usize)> = (0..train.rows())
        .map(|i| {
            let row = train.row(i);
            let dist = if p == 1 {
                row.iter().zip(query).map(|(a, b)| (a - b).abs()).sum()
            } else {
                row.iter().zip(query).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            };
            (dist, i)
        })
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let nn = &d[..k.min(d.len())];
    let score = if distance_weights {
        let exact: Vec<&(f64, usize)> = nn.iter().filter(|(dist, _)| *dist == 0.0).collect();
        if exact.is_empty() {
            let num: f64 = nn.iter().map(|&(dist, i)| f64::from(y[i]) / dist).sum();
            let den: f64 = nn.iter().map(|&(dist, _)| 1.0 / dist).sum();
            num / den
        } else {
            exact.iter().map(|&&(_, i)| f64::from(y[i])).sum::<f64>() / exact.len() as f64
        }
    } else {
        nn.iter().map(|&(_, i)| f64::from(y[i])).sum::<f64>() / nn.len() as f64
    };
    u8::from(score >= 0.5)
}

fn c06_knn() -> Outcome {
    let mut r = rng(6);
    let mut checked = 0usize;
    for fixture in 0..50u64 {
        let n = r.random_range(2..=500);
        let m = r.random_range(1..=10);
        // Small integer grid: many exact distance ties.
        let data = encoded(
            (0..m)
                .map(|_| (0..n).map(|_| f64::from(r.random_range(0..6u8))).collect())
                .collect(),
            (0..n)
                .map(|i| if i < 2 { i as u8 } else { r.random_range(0..2) })
                .collect(),
        );
        let queries = Matrix::from_rows(
            &(0..20)
                .map(|_| {
                    (0..m)
                        .map(|_| f64::from(r.random_range(0..6u8)) + 0.5 * f64::from(r.random_range(0..2u8)))
                        .collect()
                })
                .collect::<Vec<_>>(),
            m,
        )
        .unwrap();
        let k = r.random_range(1..=n.min(15));
        for p in [1u8, 2] {
            for weights in ["uniform", "distance"] {
                let params = HyperParams::new()
                    .with("n_neighbors", k as i64)
                    .with("weights", weights)
                    .with("p", i64::from(p));
                let model = fit(ModelKind::Knn, &data, &params, fixture).unwrap();
                let got = model.predict(&queries).unwrap();
                for (q, &g) in got.iter().enumerate() {
                    let want = knn_oracle(
                        &data.features,
                        &data.target,
                        queries.row(q),
                        k,
                        p,
                        weights == "distance",
                    );
                    if g != want {
                        return fail(format!("fixture {fixture} p {p} {weights} query {q}: {g} vs {want}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    pass(format!("{checked} predictions match the full-sort oracle"))
}

fn c07_naive_bayes() -> Outcome {
    let xs = [1.0, 2.0, 4.0, 6.0, 7.5, 9.0, 10.0];
    let y = [0u8, 0, 0, 1, 1, 1, 1];
    let x = Matrix::new(xs.len(), 1, xs.to_vec()).unwrap();
    let smoothing = 1e-9;
    let nb = GaussianNb::fit(&x, &y, smoothing, None);

    // Hand evaluation of P(c | x) = P(c) N(x; mu_c, s2_c) / sum_k P(k) N(x; mu_k, s2_k).
    let all_mean = xs.iter().sum::<f64>() / 7.0;
    let eps = smoothing * xs.iter().map(|v| (v - all_mean).powi(2)).sum::<f64>() / 7.0;
    let mu0 = 7.0 / 3.0;
    let s0 = ((1.0 - mu0) * (1.0f64 - mu0) + (2.0 - mu0) * (2.0f64 - mu0) + (4.0 - mu0) * (4.0f64 - mu0)) / 3.0 + eps;
    let mu1 = 32.5 / 4.0;
    let s1 = [6.0, 7.5, 9.0, 10.0]
        .iter()
        .map(|v: &f64| (v - mu1).powi(2))
        .sum::<f64>()
        / 4.0
        + eps;
    let density =
        |v: f64, mu: f64, s2: f64| (-(v - mu).powi(2) / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2).sqrt();
    let mut worst: f64 = 0.0;
    for q in [0.0, 3.0, 4.9, 5.2, 8.0, 12.0] {
        let a = 3.0 / 7.0 * density(q, mu0, s0);
        let b = 4.0 / 7.0 * density(q, mu1, s1);
        let want = b / (a + b);
        worst = worst.max((nb.score_row(&[q]) - want).abs());
    }
    verdict(worst < 1e-9, format!("max posterior error {worst:.3e}"))
}

fn c08_optimizers() -> Outcome {
    let data = random_binary_problem(60, 4, 8);
    let y: Vec<f64> = data.target.iter().map(|&v| f64::from(v)).collect();
    let theta = [0.7, -0.4, 0.25, -1.1, 0.3];
    let mut worst_grad: f64 = 0.0;
    for penalty in [Penalty::L2, Penalty::L1] {
        let obj = LogisticObjective {
            x: &data.features,
            y: &y,
            penalty,
            strength: 0.8,
        };
        let g = obj.gradient(&theta);
        for j in 0..theta.len() {
            let h = 1e-5;
            let mut up = theta;
            let mut down = theta;
            up[j] += h;
            down[j] -= h;
            let fd = (obj.value(&up) - obj.value(&down)) / (2.0 * h);
            worst_grad = worst_grad.max((g[j] - fd).abs() / g[j].abs().max(fd.abs()).max(1e-8));
        }
    }

    // LASSO without penalty against the least-squares normal equations.
    let target: Vec<f64> = (0..data.n_rows())
        .map(|i| {
            data.features
                .row(i)
                .iter()
                .enumerate()
                .map(|(j, v)| (j as f64 + 1.0) * v)
                .sum::<f64>()
                + y[i]
        })
        .collect();
    let lasso = lasso_coordinate_descent(&data.features, &target, 0.0, 1e-13, 100_000);
    let ols = LinearRegression::fit(&data.features, &target, true);
    let worst_lasso = lasso
        .coefficients
        .iter()
        .zip(&ols.coefficients)
        .map(|(a, b)| (a - b).abs())
        .fold((lasso.intercept - ols.intercept).abs(), f64::max);

    let cfg = BoosterConfig {
        n_estimators: 50,
        max_depth: Some(3),
        num_leaves: 31,
        grow_policy: GrowPolicy::Depthwise,
        learning_rate: 0.3,
        min_child_weight: 1.0,
        alpha: 0.0,
        lambda: 1.0,
        gamma: 0.0,
        colsample_bytree: 1.0,
        objective: Objective::Logistic,
    };
    let booster = Booster::fit(&data.features, &data.target, &cfg, 8);
    let monotone = booster.loss_trace.len() == 51 && booster.loss_trace.windows(2).all(|w| w[1] <= w[0]);

    // The fitted logistic optimum also has a vanishing gradient.
    let fitted = fit_logistic(&data.features, &y, Penalty::L2, 0.8, 100);
    let mut packed = fitted.coefficients.clone();
    packed.push(fitted.intercept);
    let stationary = LogisticObjective {
        x: &data.features,
        y: &y,
        penalty: Penalty::L2,
        strength: 0.8,
    }
    .optimality_residual(&packed);

    verdict(
        worst_grad < 1e-6 && worst_lasso < 1e-6 && monotone && stationary < 1e-6,
        format!(
            "gradient rel err {worst_grad:.2e}, lasso-vs-ols {worst_lasso:.2e}, boost loss {:.4} -> {:.4} monotone {monotone}, logistic residual {stationary:.1e}",
            booster.loss_trace[0],
            booster.loss_trace.last().unwrap()
        ),
    )
}

fn c09_grid() -> Outcome {
    let data = random_binary_problem(120, 3, 9);
    let seed = 99;
    let plan = kfold_plan(&data.target, 4, true, derive_seed(seed, stream::FOLDS, 0)).unwrap();
    // k = 1 under both weightings gives identical cells, exercising the tie rule.
    let grids = [
        GridSpec::new(ModelKind::Knn)
            .with("n_neighbors", vec![ParamValue::Int(1), ParamValue::Int(7)])
            .with("weights", vec!["uniform".into(), "distance".into()]),
        GridSpec::new(ModelKind::Knn)
            .with("n_neighbors", vec![ParamValue::Int(1), ParamValue::Int(1)])
            .with("p", vec![ParamValue::Int(1), ParamValue::Int(1)]),
        GridSpec::new(ModelKind::DecisionTree)
            .with("max_depth", vec![ParamValue::Int(1), ParamValue::Int(4)])
            .with("min_samples_leaf", vec![ParamValue::Int(1), ParamValue::Int(10)]),
    ];
    let mut details = Vec::new();
    for grid in grids {
        let result = match grid_search(&grid, &data, &plan, ResampleMode::None, seed) {
            Ok(r) => r,
            Err(e) => {
                // Duplicate-valued grids may be rejected; that is not a selection error.
                details.push(format!("{}: rejected ({e})", grid.kind));
                continue;
            }
        };
        // Independent loop: same folds and fit seeds, cells in the same order.
        let cells = grid.cells();
        let mut best: Option<(usize, f64)> = None;
        for (c, params) in cells.iter().enumerate() {
            let merged = params.merged_over(&default_params(grid.kind));
            let mut total = 0.0;
            for f in 0..plan.k {
                let (tr, te) = plan.split(f);
                let model = fit(
                    grid.kind,
                    &data.select_rows(&tr),
                    &merged,
                    derive_seed(seed, stream::FOLD_FIT, f as u64),
                )
                .unwrap();
                let test = data.select_rows(&te);
                let pred = model.predict(&test.features).unwrap();
                let hits = pred.iter().zip(&test.target).filter(|(a, b)| a == b).count();
                total += hits as f64 / te.len() as f64;
            }
            let mean = total / plan.k as f64;
            if best.is_none_or(|(_, b)| mean > b) {
                best = Some((c, mean));
            }
        }
        let (idx, score) = best.unwrap();
        if result.best_index != idx || (result.best_score - score).abs() > 1e-12 {
            return fail(format!(
                "{}: harness cell {} ({}) vs oracle {idx} ({score})",
                grid.kind, result.best_index, result.best_score
            ));
        }
        details.push(format!("{}: cell {idx} acc {score:.4}", grid.kind));
    }
    pass(details.join("; "))
}

fn model_row(report: &RegimeReport, kind: ModelKind) -> Option<&ModelOutcome> {
    report.outcomes.iter().find(|o| o.model == kind.name())
}

fn c10_collapse() -> Outcome {
    let Some(path) = stroke_csv() else {
        return unavailable();
    };
    let out = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.data.path = path;
    cfg.run.out_dir = out.path().to_path_buf();
    cfg.run.regime = RegimeKind::NoCvNoGrid;
    cfg.run.resample = ResampleMode::None;
    let t = Instant::now();
    let bundle = match run_pipeline(&cfg) {
        Ok(b) => b,
        Err(e) => return fail(format!("pipeline failed: {e}")),
    };
    let elapsed = t.elapsed();
    let report = &bundle.regimes[0];
    let mut ok = elapsed < Duration::from_secs(120);
    let mut details = vec![format!("negatives {:.4}", report.test_negative_prevalence)];
    for kind in [ModelKind::XgboostLike, ModelKind::RandomForest] {
        match model_row(report, kind).and_then(|o| o.metrics.as_ref()) {
            Some(m) => {
                ok &= (m.accuracy - report.test_negative_prevalence).abs() <= 0.03 && m.recall <= 0.25;
                details.push(format!("{kind} acc {:.4} recall {:.4}", m.accuracy, m.recall));
            }
            None => {
                ok = false;
                details.push(format!("{kind} missing"));
            }
        }
    }
    details.push(format!("{:.1}s", elapsed.as_secs_f64()));
    verdict(ok, details.join(", "))
}

fn c11_pre_split() -> Outcome {
    let Some(path) = stroke_csv() else {
        return unavailable();
    };
    let out = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.data.path = path;
    cfg.run.out_dir = out.path().to_path_buf();
    cfg.run.regime = RegimeKind::CvWithGrid;
    cfg.run.resample = ResampleMode::PreSplit;
    cfg.run.models = vec![ModelKind::XgboostLike, ModelKind::RandomForest, ModelKind::Knn];
    let t = Instant::now();
    let bundle = match run_pipeline(&cfg) {
        Ok(b) => b,
        Err(e) => return fail(format!("pipeline failed: {e}")),
    };
    let elapsed = t.elapsed();
    let reference = [
        (ModelKind::XgboostLike, 0.99),
        (ModelKind::RandomForest, 0.99),
        (ModelKind::Knn, 0.98),
    ];
    let mut ok = elapsed < Duration::from_secs(15 * 60);
    let mut details = Vec::new();
    for (kind, reported) in reference {
        match model_row(&bundle.regimes[0], kind).and_then(|o| o.metrics.as_ref()) {
            Some(m) => {
                ok &= m.accuracy >= 0.95;
                details.push(format!(
                    "{kind} acc {:.4} (reference {reported}, delta {:+.4})",
                    m.accuracy,
                    m.accuracy - reported
                ));
            }
            None => {
                ok = false;
                details.push(format!("{kind} missing"));
            }
        }
    }
    details.push(format!("{:.1}s", elapsed.as_secs_f64()));
    verdict(ok, details.join(", "))
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("synthetic.csv");
    std::fs::write(&data, synthetic_stroke_csv(400, 12)).unwrap();
    let mut cfg = RunConfig::default();
    cfg.data.path = data;
    cfg.run.out_dir = dir.path().join("out");
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        if let Err(e) = run_pipeline(&cfg) {
            return fail(format!("run-all failed: {e}"));
        }
        let files = ["metrics_cv_with_grid.csv", "votes.csv"];
        let bytes: Vec<Vec<u8>> = files
            .iter()
            .map(|f| std::fs::read(cfg.run.out_dir.join(f)).unwrap())
            .collect();
        snapshots.push(bytes);
    }
    verdict(
        snapshots[0] == snapshots[1],
        format!(
            "metrics and votes CSVs ({} + {} bytes) identical across runs",
            snapshots[0][0].len(),
            snapshots[0][1].len()
        ),
    )
}

// Runs without the libtest harness so the per-criterion lines always print.
fn main() {
    let checks: [(&str, Check); 12] = [
        ("ingestion counts", c01_ingestion),
        ("split arithmetic", c02_split),
        ("vote tally fixture", c03_vote_tally),
        ("metric oracle", c04_metrics),
        ("roc oracle", c05_roc),
        ("knn equivalence", c06_knn),
        ("gaussian nb equivalence", c07_naive_bayes),
        ("optimizer checks", c08_optimizers),
        ("grid search correctness", c09_grid),
        ("regime collapse pattern", c10_collapse),
        ("pre-split accuracy band", c11_pre_split),
        ("determinism", c12_determinism),
    ];
    let mut broken = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(d) => println!("PASS {:>2} {name}: {d} [{secs:.2}s]", i + 1),
            Outcome::Fail(d) => {
                println!("FAIL {:>2} {name}: {d} [{secs:.2}s]", i + 1);
                broken.push(i + 1);
            }
            Outcome::Unavailable(d) => println!("FAIL {:>2} {name}: {d}", i + 1),
        }
    }
    if !broken.is_empty() {
        eprintln!("criteria failed: {broken:?}");
        std::process::exit(1);
    }
}
