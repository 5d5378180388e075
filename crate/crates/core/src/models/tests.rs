use rand::Rng as _;

use super::*;
use crate::rng::rng;

fn encoded(x: Matrix, y: Vec<u8>) -> EncodedMatrix {
    let names = (0..x.cols()).map(|j| format!("f{j}")).collect();
    EncodedMatrix::new(x, y, names).unwrap()
}

fn blobs(n: usize, m: usize, seed: u64) -> EncodedMatrix {
    let mut r = rng(seed);
    let mut data = Vec::with_capacity(n * m);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label = u8::from(i % 3 == 0);
        for j in 0..m {
            let shift = if j < 2 && label == 1 { 2.5 } else { 0.0 };
            data.push(r.random_range(-1.0..1.0) + shift);
        }
        y.push(label);
    }
    encoded(Matrix::new(n, m, data).unwrap(), y)
}

#[test]
fn every_kind_fits_two_rows() {
    let data = encoded(Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap(), vec![0, 1]);
    for kind in ModelKind::ALL {
        let params = match kind {
            ModelKind::Knn => HyperParams::new().with("n_neighbors", 1),
            _ => HyperParams::new(),
        };
        let model = fit(kind, &data, &params, 7).unwrap_or_else(|e| panic!("{kind}: {e}"));
        let scores = model.predict_score(&data.features).unwrap();
        assert!(scores.iter().all(|s| (0.0..=1.0).contains(s)), "{kind}");
    }
}

#[test]
fn single_class_rejected() {
    let data = encoded(Matrix::new(2, 1, vec![0.0, 1.0]).unwrap(), vec![1, 1]);
    for kind in ModelKind::ALL {
        assert!(matches!(
            fit(kind, &data, &HyperParams::new(), 0),
            Err(Error::SingleClass)
        ));
    }
}

#[test]
fn knn_k_above_n_is_invalid() {
    let data = blobs(10, 2, 0);
    let err = fit(ModelKind::Knn, &data, &HyperParams::new().with("n_neighbors", 11), 0).unwrap_err();
    assert!(matches!(err, Error::InvalidParam { .. }));
}

#[test]
fn unknown_param_rejected() {
    let data = blobs(10, 2, 0);
    let err = fit(ModelKind::DecisionTree, &data, &HyperParams::new().with("depth", 3), 0).unwrap_err();
    assert!(matches!(err, Error::InvalidParam { .. }));
}

#[test]
fn predict_thresholds_score_and_checks_width() {
    let data = blobs(60, 3, 1);
    for kind in ModelKind::ALL {
        let model = fit(kind, &data, &HyperParams::new(), 3).unwrap();
        let scores = model.predict_score(&data.features).unwrap();
        let labels = model.predict(&data.features).unwrap();
        for (s, l) in scores.iter().zip(&labels) {
            assert_eq!(*l, u8::from(*s >= 0.5), "{kind}");
        }
        let narrow = data.features.select_columns(&[0, 1]);
        assert!(matches!(model.predict(&narrow), Err(Error::ShapeMismatch { .. })));
    }
}

#[test]
fn serialization_is_deterministic_and_lossless() {
    let data = blobs(80, 4, 2);
    let probe = blobs(20, 4, 99).features;
    for kind in ModelKind::ALL {
        let a = fit(kind, &data, &HyperParams::new(), 11).unwrap();
        let b = fit(kind, &data, &HyperParams::new(), 11).unwrap();
        let ja = a.to_json().unwrap();
        assert_eq!(ja, b.to_json().unwrap(), "{kind}");
        let back = TrainedModel::from_json(&ja).unwrap();
        assert_eq!(back, a, "{kind}");
        assert_eq!(back.predict_score(&probe).unwrap(), a.predict_score(&probe).unwrap());
    }
}

#[test]
fn scores_are_permutation_equivariant() {
    let data = blobs(50, 3, 4);
    let probe = blobs(15, 3, 5).features;
    let perm: Vec<usize> = (0..15).rev().collect();
    let shuffled = probe.select_rows(&perm);
    for kind in ModelKind::ALL {
        let model = fit(kind, &data, &HyperParams::new(), 0).unwrap();
        let s = model.predict_score(&probe).unwrap();
        let t = model.predict_score(&shuffled).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            assert_eq!(t[k], s[i], "{kind}");
        }
    }
}

#[test]
fn knn_one_neighbour_memorizes() {
    let data = blobs(40, 3, 6);
    let model = fit(ModelKind::Knn, &data, &HyperParams::new().with("n_neighbors", 1), 0).unwrap();
    assert_eq!(model.predict(&data.features).unwrap(), data.target);
}

#[test]
fn forest_of_one_unbagged_tree_is_a_tree() {
    let data = blobs(70, 4, 7);
    let shared = HyperParams::new()
        .with("max_depth", ParamValue::None)
        .with("min_samples_split", 2)
        .with("min_samples_leaf", 1);
    let forest = fit(
        ModelKind::RandomForest,
        &data,
        &shared
            .clone()
            .with("n_estimators", 1)
            .with("bootstrap", false)
            .with("max_features", "all"),
        5,
    )
    .unwrap();
    let tree = fit(ModelKind::DecisionTree, &data, &shared, 5).unwrap();
    assert_eq!(
        forest.predict_score(&data.features).unwrap(),
        tree.predict_score(&data.features).unwrap()
    );
}

#[test]
fn forest_fits_separable_data() {
    let mut r = rng(8);
    let n = 200;
    let mut v = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let a: f64 = r.random_range(-1.0..1.0);
        let b: f64 = r.random_range(-1.0..1.0);
        v.extend([a, b]);
        y.push(u8::from(a + b > 0.0));
    }
    let data = encoded(Matrix::new(n, 2, v).unwrap(), y);
    let params = HyperParams::new()
        .with("max_depth", ParamValue::None)
        .with("min_samples_split", 2)
        .with("min_samples_leaf", 1);
    let model = fit(ModelKind::RandomForest, &data, &params, 1).unwrap();
    let pred = model.predict(&data.features).unwrap();
    let acc = pred.iter().zip(&data.target).filter(|(a, b)| a == b).count() as f64 / n as f64;
    assert!(acc >= 0.99, "{acc}");
    let imp = model.importances().unwrap();
    assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[test]
fn decision_tree_splits_threshold_data_once() {
    let x = Matrix::new(8, 1, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
    let data = encoded(x, vec![0, 0, 0, 0, 1, 1, 1, 1]);
    for criterion in ["gini", "entropy"] {
        let model = fit(
            ModelKind::DecisionTree,
            &data,
            &HyperParams::new().with("criterion", criterion),
            0,
        )
        .unwrap();
        let ModelState::Tree(t) = &model.state else {
            unreachable!()
        };
        assert_eq!(t.tree.depth(), 1);
        assert_eq!(model.predict(&data.features).unwrap(), data.target);
    }
}

#[test]
fn svm_separates_separable_data() {
    let x = Matrix::new(6, 2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 3.0, 3.0, 4.0, 3.0, 3.0, 4.0]).unwrap();
    let data = encoded(x, vec![0, 0, 0, 1, 1, 1]);
    for cw in [ParamValue::None, ParamValue::from("balanced")] {
        let model = fit(
            ModelKind::SvmLinear,
            &data,
            &HyperParams::new().with("C", 10.0).with("class_weight", cw),
            0,
        )
        .unwrap();
        assert_eq!(model.predict(&data.features).unwrap(), data.target);
    }
}

#[test]
fn logistic_large_c_separates() {
    let x = Matrix::new(6, 1, vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]).unwrap();
    let data = encoded(x, vec![0, 0, 0, 1, 1, 1]);
    for penalty in ["l1", "l2"] {
        let model = fit(
            ModelKind::Logistic,
            &data,
            &HyperParams::new().with("C", 1e6).with("penalty", penalty),
            0,
        )
        .unwrap();
        assert_eq!(model.predict(&data.features).unwrap(), data.target);
    }
}
