//! Binary trees stored as flat node arrays, and the two growers that build
//! them: a weighted CART classifier and a second-order regression tree for
//! gradient boosting.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;
use crate::stats::soft_threshold;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Gini,
    Entropy,
}

impl Criterion {
    /// Impurity of a two-class node whose positive fraction is `p`. Entropy is in bits.
    pub fn impurity(self, p: f64) -> f64 {
        match self {
            Criterion::Gini => 2.0 * p * (1.0 - p),
            Criterion::Entropy => {
                let h = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
                h(p) + h(1.0 - p)
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gini" => Ok(Criterion::Gini),
            "entropy" => Ok(Criterion::Entropy),
            other => Err(Error::param("criterion", other, "gini or entropy")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Node 0 is the root; children are referenced by index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![TreeNode::Leaf { value }],
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }

    /// Number of splits on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            match self.nodes[i] {
                TreeNode::Leaf { .. } => best = best.max(d),
                TreeNode::Split { left, right, .. } => {
                    stack.push((left, d + 1));
                    stack.push((right, d + 1));
                }
            }
        }
        best
    }
}

/// Column copies of a matrix plus, per feature, the row indices in ascending
/// value order (ties by row index). Built once and shared by every tree
/// fitted on the same rows.
pub(crate) struct Presorted {
    pub cols: Vec<Vec<f64>>,
    pub order: Vec<Vec<u32>>,
}

impl Presorted {
    pub fn new(x: &Matrix) -> Self {
        let cols: Vec<Vec<f64>> = (0..x.cols()).map(|j| x.column(j)).collect();
        let order = cols
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..col.len() as u32).collect();
                idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                idx
            })
            .collect();
        Self { cols, order }
    }

    pub fn n_features(&self) -> usize {
        self.cols.len()
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let mid = a + (b - a) / 2.0;
    if mid >= b {
        a
    } else {
        mid
    }
}

/// Stable partition of `seg` into rows flagged in `left`, then the rest.
fn partition(seg: &mut [u32], left: &[bool], buf: &mut Vec<u32>) {
    buf.clear();
    let mut l = 0;
    for k in 0..seg.len() {
        let s = seg[k];
        if left[s as usize] {
            seg[l] = s;
            l += 1;
        } else {
            buf.push(s);
        }
    }
    seg[l..].copy_from_slice(buf);
}

#[derive(Clone, Copy, Debug)]
/// Growth limits for a classification tree.
pub struct CartParams {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features drawn per node; `None` means all.
    pub max_features: Option<usize>,
}

impl Default for CartParams {
    fn default() -> Self {
        Self {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: None,
        }
    }
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    n_left: usize,
}

/// Whether `(gain, feature)` beats the incumbent: larger gain, then lower feature index.
fn better(gain: f64, feature: usize, best: &Option<Candidate>) -> bool {
    match best {
        None => true,
        Some(b) => gain > b.gain || (gain == b.gain && feature < b.feature),
    }
}

/// Grows a classification tree on rows with positive weight. `y` holds 0/1
/// labels as reals; leaf values are weighted positive fractions. Weighted
/// impurity decreases are added to `importance` per feature.
pub(crate) fn grow_classifier(
    data: &Presorted,
    y: &[f64],
    weights: &[f64],
    params: &CartParams,
    rng: &mut Rng,
    importance: &mut [f64],
) -> Tree {
    let m = data.n_features();
    let n = y.len();
    if m == 0 {
        let w: f64 = weights.iter().sum();
        let wp: f64 = weights.iter().zip(y).map(|(w, y)| w * y).sum();
        return Tree::leaf(if w > 0.0 { wp / w } else { 0.0 });
    }
    let mut ord: Vec<Vec<u32>> = data
        .order
        .iter()
        .map(|o| o.iter().copied().filter(|&i| weights[i as usize] > 0.0).collect())
        .collect();
    let n_active = ord[0].len();
    let min_leaf = params.min_samples_leaf.max(1);
    let mut nodes = vec![TreeNode::Leaf { value: 0.0 }];
    let mut stack = vec![(0usize, 0usize, n_active, 0usize)];
    let mut goes_left = vec![false; n];
    let mut buf = Vec::with_capacity(n_active);
    let mut feats: Vec<usize> = (0..m).collect();

    while let Some((id, start, end, depth)) = stack.pop() {
        let (mut w, mut wp) = (0.0, 0.0);
        for &s in &ord[0][start..end] {
            let s = s as usize;
            w += weights[s];
            wp += weights[s] * y[s];
        }
        let value = if w > 0.0 { wp / w } else { 0.0 };
        nodes[id] = TreeNode::Leaf { value };
        let count = end - start;
        if params.max_depth.is_some_and(|d| depth >= d)
            || count < params.min_samples_split
            || count < 2 * min_leaf
            || wp <= 0.0
            || wp >= w
        {
            continue;
        }
        let parent = w * params.criterion.impurity(value);

        let mut best: Option<Candidate> = None;
        let consider = |f: usize, best: &mut Option<Candidate>| {
            let idx = &ord[f][start..end];
            if let Some((gain, threshold, n_left)) = scan_classifier(
                &data.cols[f],
                idx,
                y,
                weights,
                (w, wp, parent),
                params.criterion,
                min_leaf,
            ) {
                if better(gain, f, best) {
                    *best = Some(Candidate {
                        gain,
                        feature: f,
                        threshold,
                        n_left,
                    });
                }
            }
        };
        match params.max_features {
            Some(k) if k < m => {
                let mut visited = 0;
                let mut i = 0;
                while i < m && visited < k {
                    let j = rng.random_range(i..m);
                    feats.swap(i, j);
                    let f = feats[i];
                    i += 1;
                    let seg = &ord[f][start..end];
                    let col = &data.cols[f];
                    if col[seg[0] as usize] == col[seg[seg.len() - 1] as usize] {
                        continue;
                    }
                    visited += 1;
                    consider(f, &mut best);
                }
            }
            _ => {
                for f in 0..m {
                    consider(f, &mut best);
                }
            }
        }
        let Some(split) = best else { continue };

        let (lo, hi) = ord[split.feature][start..end].split_at(split.n_left);
        for &s in lo {
            goes_left[s as usize] = true;
        }
        for &s in hi {
            goes_left[s as usize] = false;
        }
        for o in ord.iter_mut() {
            partition(&mut o[start..end], &goes_left, &mut buf);
        }
        importance[split.feature] += split.gain.max(0.0);
        let left = nodes.len();
        nodes.push(TreeNode::Leaf { value: 0.0 });
        nodes.push(TreeNode::Leaf { value: 0.0 });
        nodes[id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right: left + 1,
        };
        let mid = start + split.n_left;
        stack.push((left + 1, mid, end, depth + 1));
        stack.push((left, start, mid, depth + 1));
    }
    Tree { nodes }
}

/// Best threshold on one feature: `(weighted impurity decrease, threshold, rows left)`.
fn scan_classifier(
    col: &[f64],
    idx: &[u32],
    y: &[f64],
    weights: &[f64],
    (w, wp, parent): (f64, f64, f64),
    criterion: Criterion,
    min_leaf: usize,
) -> Option<(f64, f64, usize)> {
    let n = idx.len();
    let (mut wl, mut wpl) = (0.0, 0.0);
    let mut best: Option<(f64, f64, usize)> = None;
    for i in 0..n - 1 {
        let s = idx[i] as usize;
        wl += weights[s];
        wpl += weights[s] * y[s];
        let n_left = i + 1;
        if n_left < min_leaf {
            continue;
        }
        if n - n_left < min_leaf {
            break;
        }
        let a = col[s];
        let b = col[idx[i + 1] as usize];
        if b <= a {
            continue;
        }
        let wr = w - wl;
        if wl <= 0.0 || wr <= 0.0 {
            continue;
        }
        let pl = (wpl / wl).clamp(0.0, 1.0);
        let pr = ((wp - wpl) / wr).clamp(0.0, 1.0);
        let gain = parent - wl * criterion.impurity(pl) - wr * criterion.impurity(pr);
        if best.is_none_or(|(g, _, _)| gain > g) {
            best = Some((gain, midpoint(a, b), n_left));
        }
    }
    best
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct BoostTreeParams {
    pub max_depth: Option<usize>,
    /// Leaf budget for best-first growth; `None` expands every useful split.
    pub max_leaves: Option<usize>,
    pub min_child_weight: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub learning_rate: f64,
}

impl BoostTreeParams {
    fn score(&self, g: f64, h: f64) -> f64 {
        let denom = h + self.lambda;
        if denom <= 0.0 {
            return 0.0;
        }
        let t = soft_threshold(g, self.alpha);
        t * t / denom
    }

    /// Optimal leaf weight `-T_alpha(G) / (H + lambda)`.
    pub fn leaf_weight(&self, g: f64, h: f64) -> f64 {
        let denom = h + self.lambda;
        if denom <= 0.0 {
            return 0.0;
        }
        -soft_threshold(g, self.alpha) / denom
    }

    pub fn split_gain(&self, gl: f64, hl: f64, gr: f64, hr: f64) -> f64 {
        0.5 * (self.score(gl, hl) + self.score(gr, hr) - self.score(gl + gr, hl + hr)) - self.gamma
    }
}

struct OpenLeaf {
    id: usize,
    start: usize,
    end: usize,
    depth: usize,
    g: f64,
    h: f64,
    split: Option<Candidate>,
}

/// Grows one boosting tree on gradients `grad` and hessians `hess`, using
/// only the listed features. Leaves hold `learning_rate * weight`. Split gains
/// are added to `gain_importance`.
pub(crate) fn grow_boost_tree(
    data: &Presorted,
    features: &[usize],
    grad: &[f64],
    hess: &[f64],
    params: &BoostTreeParams,
    gain_importance: &mut [f64],
) -> Tree {
    let n = grad.len();
    let mut ord: Vec<Vec<u32>> = features.iter().map(|&f| data.order[f].clone()).collect();
    let (g, h) = (grad.iter().sum::<f64>(), hess.iter().sum::<f64>());
    let mut nodes = vec![TreeNode::Leaf {
        value: params.learning_rate * params.leaf_weight(g, h),
    }];
    if features.is_empty() || n == 0 {
        return Tree { nodes };
    }
    let find = |ord: &[Vec<u32>], leaf: &mut OpenLeaf| {
        if params.max_depth.is_some_and(|d| leaf.depth >= d) {
            return;
        }
        let mut best: Option<Candidate> = None;
        for (pos, &f) in features.iter().enumerate() {
            let col = &data.cols[f];
            let idx = &ord[pos][leaf.start..leaf.end];
            let (mut gl, mut hl) = (0.0, 0.0);
            let mut local: Option<(f64, f64, usize)> = None;
            for i in 0..idx.len().saturating_sub(1) {
                let s = idx[i] as usize;
                gl += grad[s];
                hl += hess[s];
                let a = col[s];
                let b = col[idx[i + 1] as usize];
                if b <= a {
                    continue;
                }
                let hr = leaf.h - hl;
                if hl < params.min_child_weight || hr < params.min_child_weight {
                    continue;
                }
                let gain = params.split_gain(gl, hl, leaf.g - gl, hr);
                if local.is_none_or(|(lg, _, _)| gain > lg) {
                    local = Some((gain, midpoint(a, b), i + 1));
                }
            }
            if let Some((gain, threshold, n_left)) = local {
                if gain > 0.0 && better(gain, f, &best) {
                    best = Some(Candidate {
                        gain,
                        feature: pos,
                        threshold,
                        n_left,
                    });
                }
            }
        }
        leaf.split = best;
    };

    let mut root = OpenLeaf {
        id: 0,
        start: 0,
        end: n,
        depth: 0,
        g,
        h,
        split: None,
    };
    find(&ord, &mut root);
    let mut open = vec![root];
    let mut n_leaves = 1;
    let mut goes_left = vec![false; n];
    let mut buf = Vec::with_capacity(n);
    loop {
        if params.max_leaves.is_some_and(|k| n_leaves >= k) {
            break;
        }
        // Highest gain first; among equals, the earliest node.
        let mut pick: Option<usize> = None;
        for (k, leaf) in open.iter().enumerate() {
            if let Some(c) = &leaf.split {
                let wins = match pick {
                    None => true,
                    Some(p) => {
                        let pc = open[p].split.as_ref().expect("picked leaf has a split");
                        c.gain > pc.gain || (c.gain == pc.gain && leaf.id < open[p].id)
                    }
                };
                if wins {
                    pick = Some(k);
                }
            }
        }
        let Some(k) = pick else { break };
        let leaf = open.swap_remove(k);
        let split = leaf.split.expect("picked leaf has a split");
        let (lo, hi) = ord[split.feature][leaf.start..leaf.end].split_at(split.n_left);
        let (mut gl, mut hl) = (0.0, 0.0);
        for &s in lo {
            goes_left[s as usize] = true;
            gl += grad[s as usize];
            hl += hess[s as usize];
        }
        for &s in hi {
            goes_left[s as usize] = false;
        }
        for o in ord.iter_mut() {
            partition(&mut o[leaf.start..leaf.end], &goes_left, &mut buf);
        }
        let feature = features[split.feature];
        gain_importance[feature] += split.gain;
        let left = nodes.len();
        let (gr, hr) = (leaf.g - gl, leaf.h - hl);
        nodes.push(TreeNode::Leaf {
            value: params.learning_rate * params.leaf_weight(gl, hl),
        });
        nodes.push(TreeNode::Leaf {
            value: params.learning_rate * params.leaf_weight(gr, hr),
        });
        nodes[leaf.id] = TreeNode::Split {
            feature,
            threshold: split.threshold,
            left,
            right: left + 1,
        };
        n_leaves += 1;
        let mid = leaf.start + split.n_left;
        for (id, start, end, g, h) in [(left, leaf.start, mid, gl, hl), (left + 1, mid, leaf.end, gr, hr)] {
            let mut child = OpenLeaf {
                id,
                start,
                end,
                depth: leaf.depth + 1,
                g,
                h,
                split: None,
            };
            find(&ord, &mut child);
            open.push(child);
        }
    }
    Tree { nodes }
}
