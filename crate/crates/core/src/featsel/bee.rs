use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{SelectorKind, SelectorVerdict};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::models::{fit_logistic, Penalty};
use crate::rng::{rng, Rng};
use crate::stats::standardize;
use crate::tabular::{class_counts, EncodedMatrix};
use crate::tuning::{kfold_plan, FoldPlan};

/// Per-feature cost subtracted from a mask's cross-validated accuracy.
const SIZE_PENALTY: f64 = 0.001;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeeColonyConfig {
    /// Employed plus onlooker bees; half this many food sources are kept.
    pub colony_size: usize,
    pub max_iterations: usize,
    /// Failed improvement attempts before a source is abandoned.
    pub abandonment_limit: usize,
    /// Overrides the seed handed down by the pipeline.
    pub seed: Option<u64>,
    /// Folds used to score a mask.
    pub fitness_folds: usize,
}

impl Default for BeeColonyConfig {
    fn default() -> Self {
        Self {
            colony_size: 20,
            max_iterations: 50,
            abandonment_limit: 10,
            seed: None,
            fitness_folds: 3,
        }
    }
}

impl BeeColonyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.colony_size < 2 {
            return Err(Error::InvalidConfig("bee colony_size must be at least 2".into()));
        }
        if self.abandonment_limit == 0 {
            return Err(Error::InvalidConfig("bee abandonment_limit must be at least 1".into()));
        }
        if self.fitness_folds < 2 {
            return Err(Error::InvalidConfig("bee fitness_folds must be at least 2".into()));
        }
        Ok(())
    }
}

/// Mean validation accuracy over `plan` of an L2 logistic regression
/// (`C = 1`) on the masked columns of `x`, minus `0.001` per kept feature.
/// The empty mask scores negative infinity.
pub fn mask_fitness(x: &Matrix, y: &[u8], mask: &[bool], plan: &FoldPlan) -> f64 {
    let cols: Vec<usize> = (0..mask.len()).filter(|&j| mask[j]).collect();
    if cols.is_empty() {
        return f64::NEG_INFINITY;
    }
    let sub = x.select_columns(&cols);
    let mut total = 0.0;
    for fold in 0..plan.k {
        let (train, val) = plan.split(fold);
        let yt: Vec<f64> = train.iter().map(|&i| f64::from(y[i])).collect();
        let model = fit_logistic(&sub.select_rows(&train), &yt, Penalty::L2, 1.0, 100);
        let hits = val
            .iter()
            .filter(|&&i| u8::from(model.margin(sub.row(i)) >= 0.0) == y[i])
            .count();
        total += hits as f64 / val.len().max(1) as f64;
    }
    total / plan.k as f64 - SIZE_PENALTY * cols.len() as f64
}

struct Evaluator<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    plan: FoldPlan,
    cache: HashMap<Vec<bool>, f64>,
}

impl Evaluator<'_> {
    fn fitness(&mut self, mask: &[bool]) -> f64 {
        if let Some(&f) = self.cache.get(mask) {
            return f;
        }
        let f = mask_fitness(self.x, self.y, mask, &self.plan);
        self.cache.insert(mask.to_vec(), f);
        f
    }
}

fn random_mask(m: usize, r: &mut Rng) -> Vec<bool> {
    loop {
        let mask: Vec<bool> = (0..m).map(|_| r.random_bool(0.5)).collect();
        if mask.iter().any(|&b| b) {
            return mask;
        }
    }
}

/// Copies one bit on which `source` and `partner` differ into `source`; when
/// they agree everywhere a random bit is flipped. Returns `None` if the move
/// would empty the mask.
fn neighbour(source: &[bool], partner: &[bool], r: &mut Rng) -> Option<Vec<bool>> {
    let diff: Vec<usize> = (0..source.len()).filter(|&j| source[j] != partner[j]).collect();
    let mut next = source.to_vec();
    if diff.is_empty() {
        let j = r.random_range(0..source.len());
        next[j] = !next[j];
    } else {
        let j = diff[r.random_range(0..diff.len())];
        next[j] = partner[j];
    }
    next.iter().any(|&b| b).then_some(next)
}

fn pick_partner(n_sources: usize, me: usize, r: &mut Rng) -> usize {
    if n_sources == 1 {
        return me;
    }
    let p = r.random_range(0..n_sources - 1);
    if p >= me {
        p + 1
    } else {
        p
    }
}

/// One greedy neighbour attempt on source `i`.
fn try_improve(
    eval: &mut Evaluator<'_>,
    i: usize,
    sources: &mut [Vec<bool>],
    fit: &mut [f64],
    trials: &mut [usize],
    r: &mut Rng,
) {
    let partner = pick_partner(sources.len(), i, r);
    let improved = match neighbour(&sources[i], &sources[partner], r) {
        Some(cand) => {
            let f = eval.fitness(&cand);
            let better = f > fit[i];
            if better {
                sources[i] = cand;
                fit[i] = f;
            }
            better
        }
        None => false,
    };
    if improved {
        trials[i] = 0;
    } else {
        trials[i] += 1;
    }
}

/// Binary artificial bee colony over feature masks.
///
/// Fitness is [`mask_fitness`] on standardized features. Each iteration
/// runs an employed phase (one neighbour move per source, greedy
/// replacement), an onlooker phase (sources chosen with probability
/// proportional to `max(fitness, 0) + 1e-9`) and a scout phase (the source
/// with most failed trials beyond the limit is re-drawn at random). The
/// best mask seen is kept; `trace` holds its fitness after every
/// iteration. Score `j` is the fitness lost by toggling bit `j` of the best
/// mask (the full best fitness when the toggle would empty it).
pub fn select_bee_colony(matrix: &EncodedMatrix, cfg: &BeeColonyConfig) -> Result<SelectorVerdict> {
    cfg.validate()?;
    let (neg, pos) = class_counts(&matrix.target);
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let m = matrix.n_features();
    if m == 0 {
        return Err(Error::InvalidConfig("bee colony needs at least one feature".into()));
    }
    let seed = cfg.seed.unwrap_or(0);
    let x = standardize(&matrix.features);
    let plan = kfold_plan(&matrix.target, cfg.fitness_folds, true, seed)?;
    let mut eval = Evaluator {
        x: &x,
        y: &matrix.target,
        plan,
        cache: HashMap::new(),
    };
    let mut r = rng(seed);
    let n_sources = (cfg.colony_size / 2).max(1);

    let mut sources: Vec<Vec<bool>> = (0..n_sources).map(|_| random_mask(m, &mut r)).collect();
    let mut fit: Vec<f64> = sources.iter().map(|s| eval.fitness(s)).collect();
    let mut trials = vec![0usize; n_sources];
    let mut best = sources[0].clone();
    let mut best_fit = fit[0];
    let mut trace = Vec::with_capacity(cfg.max_iterations);

    let update_best = |sources: &[Vec<bool>], fit: &[f64], best: &mut Vec<bool>, best_fit: &mut f64| {
        for (s, &f) in sources.iter().zip(fit) {
            if f > *best_fit {
                *best_fit = f;
                *best = s.clone();
            }
        }
    };
    update_best(&sources, &fit, &mut best, &mut best_fit);

    for _ in 0..cfg.max_iterations {
        for i in 0..n_sources {
            try_improve(&mut eval, i, &mut sources, &mut fit, &mut trials, &mut r);
        }
        for _ in 0..n_sources {
            let weights: Vec<f64> = fit.iter().map(|&f| f.max(0.0) + 1e-9).collect();
            let total: f64 = weights.iter().sum();
            let mut u = r.random::<f64>() * total;
            let mut pick = n_sources - 1;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            try_improve(&mut eval, pick, &mut sources, &mut fit, &mut trials, &mut r);
        }
        update_best(&sources, &fit, &mut best, &mut best_fit);
        let worn = (0..n_sources)
            .filter(|&i| trials[i] > cfg.abandonment_limit)
            .max_by(|&a, &b| trials[a].cmp(&trials[b]).then(b.cmp(&a)));
        if let Some(i) = worn {
            sources[i] = random_mask(m, &mut r);
            fit[i] = eval.fitness(&sources[i]);
            trials[i] = 0;
            update_best(&sources, &fit, &mut best, &mut best_fit);
        }
        trace.push(best_fit);
    }

    let scores: Vec<f64> = (0..m)
        .map(|j| {
            let mut toggled = best.clone();
            toggled[j] = !toggled[j];
            if toggled.iter().any(|&b| b) {
                best_fit - eval.fitness(&toggled)
            } else {
                best_fit
            }
        })
        .collect();
    let mut verdict = SelectorVerdict::new(SelectorKind::BeeColony, matrix, best, scores);
    verdict.trace = trace;
    Ok(verdict)
}
