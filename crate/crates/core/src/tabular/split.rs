use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
    pub ratio: f64,
}

/// `floor(ratio * n)`, tolerant of the representation error in decimal ratios.
fn train_size(ratio: f64, n: usize) -> usize {
    (ratio * n as f64 + 1e-9).floor() as usize
}

/// Random train/test partition of `0..target.len()`.
///
/// `|train| = floor(ratio * n)`. With `stratified`, each class contributes to
/// the training side in proportion to its size (largest-remainder rounding),
/// so train and test class proportions track the overall proportion. Both
/// index lists are returned in ascending order.
pub fn train_test_split(target: &[u8], ratio: f64, seed: u64, stratified: bool) -> Result<SplitIndices> {
    let n = target.len();
    if !(ratio > 0.0 && ratio < 1.0) || n < 2 {
        return Err(Error::DegenerateRatio { ratio, n });
    }
    let n_train = train_size(ratio, n);
    if n_train == 0 || n_train == n {
        return Err(Error::DegenerateRatio { ratio, n });
    }
    super::check_binary(target)?;
    let mut rng = rng(seed);

    let mut train = Vec::with_capacity(n_train);
    let mut test = Vec::with_capacity(n - n_train);
    if stratified {
        let mut members: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (i, &y) in target.iter().enumerate() {
            members[y as usize].push(i);
        }
        for (class, m) in members.iter().enumerate() {
            if m.is_empty() {
                return Err(Error::EmptyClass(class as u8));
            }
        }
        let ideal: Vec<f64> = members
            .iter()
            .map(|m| m.len() as f64 * n_train as f64 / n as f64)
            .collect();
        let mut quota: Vec<usize> = ideal.iter().map(|v| v.floor() as usize).collect();
        let mut remaining = n_train - quota.iter().sum::<usize>();
        let mut order = [0usize, 1];
        order.sort_by(|&a, &b| {
            let fa = ideal[a] - ideal[a].floor();
            let fb = ideal[b] - ideal[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &c in order.iter().cycle() {
            if remaining == 0 {
                break;
            }
            if quota[c] < members[c].len() {
                quota[c] += 1;
                remaining -= 1;
            }
        }
        for (class, m) in members.iter_mut().enumerate() {
            m.shuffle(&mut rng);
            train.extend_from_slice(&m[..quota[class]]);
            test.extend_from_slice(&m[quota[class]..]);
        }
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        train.extend_from_slice(&all[..n_train]);
        test.extend_from_slice(&all[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices {
        train,
        test,
        seed,
        ratio,
    })
}
