use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnnWeights {
    Uniform,
    Distance,
}

/// Minkowski distance for `p` in {1, 2}.
pub fn minkowski(a: &[f64], b: &[f64], p: u8) -> f64 {
    if p == 1 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    } else {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Exact k-nearest-neighbour classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub x: Matrix,
    pub y: Vec<u8>,
    pub k: usize,
    pub weights: KnnWeights,
    pub p: u8,
}

impl Knn {
    /// The `k` training rows closest to `query` as `(distance, row)`, nearest
    /// first; equal distances are ordered by row index.
    pub fn neighbors(&self, query: &[f64]) -> Vec<(f64, usize)> {
        let mut d: Vec<(f64, usize)> = self
            .x
            .row_iter()
            .enumerate()
            .map(|(i, row)| (minkowski(row, query, self.p), i))
            .collect();
        let k = self.k.min(d.len());
        if k < d.len() {
            d.select_nth_unstable_by(k, by_distance_then_index);
            d.truncate(k);
        }
        d.sort_unstable_by(by_distance_then_index);
        d
    }

    pub fn score_row(&self, query: &[f64]) -> f64 {
        let nn = self.neighbors(query);
        let label = |i: usize| f64::from(self.y[i]);
        match self.weights {
            KnnWeights::Uniform => nn.iter().map(|&(_, i)| label(i)).sum::<f64>() / nn.len() as f64,
            KnnWeights::Distance => {
                let exact: Vec<usize> = nn.iter().filter(|(d, _)| *d == 0.0).map(|&(_, i)| i).collect();
                if !exact.is_empty() {
                    return exact.iter().map(|&i| label(i)).sum::<f64>() / exact.len() as f64;
                }
                let (num, den) = nn
                    .iter()
                    .fold((0.0, 0.0), |(num, den), &(d, i)| (num + label(i) / d, den + 1.0 / d));
                num / den
            }
        }
    }
}
