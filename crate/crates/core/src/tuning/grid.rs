use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cv::{cross_val_accuracy, CvResult, Estimator, ModelSpec, ResampleMode};
use super::folds::FoldPlan;
use crate::error::{Error, Result};
use crate::models::{validate, HyperParams, ModelKind, ParamValue};
use crate::tabular::EncodedMatrix;

/// Value lists per hyper-parameter for one model kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: ModelKind,
    pub values: BTreeMap<String, Vec<ParamValue>>,
}

fn list<T: Into<ParamValue> + Clone>(items: &[T]) -> Vec<ParamValue> {
    items.iter().cloned().map(Into::into).collect()
}

impl GridSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, values: Vec<ParamValue>) -> Self {
        self.values.insert(key.to_owned(), values);
        self
    }

    /// The reference search space for each model kind.
    ///
    /// Gaussian NB's priors list is cut to `[None]`: the reference
    /// alternatives have three entries, which a binary model cannot take.
    pub fn reference(kind: ModelKind) -> Self {
        let g = GridSpec::new(kind);
        let none = ParamValue::None;
        match kind {
            ModelKind::Linear => g
                .with("fit_intercept", list(&[true, false]))
                .with("copy_X", list(&[true, false])),
            ModelKind::Logistic => g
                .with("penalty", list(&["l1", "l2"]))
                .with("C", list(&[0.1, 1.0, 10.0])),
            ModelKind::DecisionTree => g
                .with("max_depth", vec![none, 10.into(), 20.into()])
                .with("min_samples_split", list(&[2, 5, 10]))
                .with("min_samples_leaf", list(&[1, 2, 4])),
            ModelKind::AdaboostR => g
                .with("n_estimators", list(&[50, 100, 150]))
                .with("learning_rate", list(&[0.1, 0.01, 0.001])),
            ModelKind::Knn => g
                .with("n_neighbors", list(&[3, 5, 7, 9]))
                .with("weights", list(&["uniform", "distance"]))
                .with("p", list(&[1, 2])),
            ModelKind::GaussianNb => g
                .with("var_smoothing", list(&[1e-9, 1e-8, 1e-7]))
                .with("priors", vec![none]),
            ModelKind::SvmLinear => g
                .with("C", list(&[0.1, 1.0, 10.0, 100.0]))
                .with(
                    "gamma",
                    vec!["scale".into(), "auto".into(), 0.1.into(), 0.01.into(), 0.001.into()],
                )
                .with("class_weight", vec![none, "balanced".into()]),
            ModelKind::XgboostLike => g
                .with("n_estimators", list(&[50, 100, 150]))
                .with("max_depth", list(&[3, 5, 7]))
                .with("learning_rate", list(&[0.01, 0.1, 0.2]))
                .with("min_child_weight", list(&[1, 5, 10])),
            ModelKind::RandomForest => g
                .with("n_estimators", list(&[50, 100, 150]))
                .with("max_depth", vec![none, 10.into(), 20.into(), 30.into()])
                .with("min_samples_split", list(&[2, 5, 10]))
                .with("min_samples_leaf", list(&[1, 2, 4])),
        }
    }

    /// Every list non-empty and every value valid for the kind.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidConfig(format!("grid for {} is empty", self.kind)));
        }
        for (key, vals) in &self.values {
            if vals.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "grid for {} has no values for `{key}`",
                    self.kind
                )));
            }
            for v in vals {
                validate(self.kind, &HyperParams::new().with(key, v.clone()))?;
            }
        }
        Ok(())
    }

    /// Cross product in key order, the last key varying fastest.
    pub fn cells(&self) -> Vec<HyperParams> {
        let mut cells = vec![HyperParams::new()];
        for (key, vals) in &self.values {
            cells = cells
                .into_iter()
                .flat_map(|c| vals.iter().map(move |v| c.clone().with(key, v.clone())))
                .collect();
        }
        cells
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub params: HyperParams,
    pub cv: Option<CvResult>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub cells: Vec<GridCell>,
    pub best_index: usize,
    pub best_params: HyperParams,
    pub best_score: f64,
}

/// Cross-validates every cell of `grid` and keeps the one with the highest
/// mean accuracy.
pub fn grid_search(
    grid: &GridSpec,
    data: &EncodedMatrix,
    plan: &FoldPlan,
    mode: ResampleMode,
    seed: u64,
) -> Result<GridResult> {
    grid.validate()?;
    let kind = grid.kind;
    grid_search_with(
        &grid.cells(),
        |params| {
            Box::new(ModelSpec {
                kind,
                params: params.clone(),
            })
        },
        data,
        plan,
        mode,
        seed,
    )
}

/// Grid search over explicit cells with a caller-supplied estimator factory.
///
/// All cells share `seed`, so they see the same resampled folds and fit
/// seeds. Ties keep the earliest cell; failed cells are recorded and
/// skipped.
pub fn grid_search_with<F>(
    cells: &[HyperParams],
    build: F,
    data: &EncodedMatrix,
    plan: &FoldPlan,
    mode: ResampleMode,
    seed: u64,
) -> Result<GridResult>
where
    F: Fn(&HyperParams) -> Box<dyn Estimator>,
{
    if cells.is_empty() {
        return Err(Error::InvalidConfig("grid has no cells".into()));
    }
    let mut out = Vec::with_capacity(cells.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, params) in cells.iter().enumerate() {
        let est = build(params);
        match cross_val_accuracy(est.as_ref(), data, plan, mode, seed) {
            Ok(cv) => {
                if best.is_none_or(|(_, s)| cv.mean > s) {
                    best = Some((i, cv.mean));
                }
                out.push(GridCell {
                    params: params.clone(),
                    cv: Some(cv),
                    error: None,
                });
            }
            Err(e) => {
                log::warn!("grid cell {params} failed: {e}");
                out.push(GridCell {
                    params: params.clone(),
                    cv: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let (best_index, best_score) = best.ok_or(Error::AllCellsFailed)?;
    Ok(GridResult {
        best_params: cells[best_index].clone(),
        cells: out,
        best_index,
        best_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::tuning::cv::Predictor;
    use crate::tuning::kfold_plan;

    #[test]
    fn reference_grids_are_valid_with_expected_sizes() {
        let sizes = [
            (ModelKind::Linear, 4),
            (ModelKind::Logistic, 6),
            (ModelKind::DecisionTree, 27),
            (ModelKind::AdaboostR, 9),
            (ModelKind::Knn, 16),
            (ModelKind::GaussianNb, 3),
            (ModelKind::SvmLinear, 40),
            (ModelKind::XgboostLike, 81),
            (ModelKind::RandomForest, 108),
        ];
        for (kind, n) in sizes {
            let g = GridSpec::reference(kind);
            g.validate().unwrap();
            assert_eq!(g.cells().len(), n, "{kind}");
        }
    }

    #[test]
    fn cells_follow_sorted_keys_last_fastest() {
        let g = GridSpec::new(ModelKind::Knn)
            .with("weights", list(&["uniform", "distance"]))
            .with("n_neighbors", list(&[3, 5]));
        let cells: Vec<String> = g.cells().iter().map(ToString::to_string).collect();
        assert_eq!(
            cells,
            [
                "n_neighbors=3 weights=uniform",
                "n_neighbors=3 weights=distance",
                "n_neighbors=5 weights=uniform",
                "n_neighbors=5 weights=distance"
            ]
        );
    }

    #[test]
    fn invalid_grid_values_are_rejected() {
        let g = GridSpec::new(ModelKind::Knn).with("n_neighbors", list(&[0]));
        assert!(g.validate().is_err());
        let g = GridSpec::new(ModelKind::Knn).with("n_neighbors", vec![]);
        assert!(g.validate().is_err());
        let g = GridSpec::new(ModelKind::Knn).with("depth", list(&[1]));
        assert!(g.validate().is_err());
    }

    struct Fixed(f64);

    impl Predictor for Fixed {
        fn predict_score(&self, x: &Matrix) -> Result<Vec<f64>> {
            Ok(vec![self.0; x.rows()])
        }
    }

    struct FixedEst(f64);

    impl Estimator for FixedEst {
        fn fit(&self, _: &EncodedMatrix, _: u64) -> Result<Box<dyn Predictor>> {
            if self.0.is_nan() {
                return Err(Error::SingleClass);
            }
            Ok(Box::new(Fixed(self.0)))
        }
    }

    fn stub_cells(scores: &[f64]) -> Vec<HyperParams> {
        scores.iter().map(|&s| HyperParams::new().with("score", s)).collect()
    }

    fn stub_data() -> EncodedMatrix {
        let x = Matrix::from_columns(&[(0..30).map(f64::from).collect()]).unwrap();
        let y = (0..30).map(|i| u8::from(i % 3 == 0)).collect();
        EncodedMatrix::new(x, y, vec!["x".into()]).unwrap()
    }

    fn run_stub(scores: &[f64]) -> Result<GridResult> {
        let data = stub_data();
        let plan = kfold_plan(&data.target, 3, true, 1).unwrap();
        grid_search_with(
            &stub_cells(scores),
            |p| Box::new(FixedEst(p.get("score").unwrap().as_f64().unwrap_or(f64::NAN))),
            &data,
            &plan,
            ResampleMode::None,
            0,
        )
    }

    #[test]
    fn single_cell_and_ties() {
        let r = run_stub(&[0.9]).unwrap();
        assert_eq!(r.best_index, 0);
        // 0.1 and 0.2 both predict all-negative: equal accuracy, earlier wins.
        let r = run_stub(&[0.9, 0.1, 0.2]).unwrap();
        assert_eq!(r.best_index, 1);
        assert!((r.best_score - 2.0 / 3.0).abs() < 1e-12);
        let max = r
            .cells
            .iter()
            .filter_map(|c| c.cv.as_ref())
            .map(|c| c.mean)
            .fold(f64::MIN, f64::max);
        assert_eq!(r.best_score, max);
    }

    #[test]
    fn all_failed_cells() {
        assert!(matches!(run_stub(&[f64::NAN, f64::NAN]), Err(Error::AllCellsFailed)));
        let r = run_stub(&[f64::NAN, 0.9]).unwrap();
        assert_eq!(r.best_index, 1);
        assert!(r.cells[0].error.is_some());
    }
}
