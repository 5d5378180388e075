use serde::{Deserialize, Serialize};

use crate::matrix::{cholesky_solve, dot, Matrix};
use crate::stats::{sigmoid, softplus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    L1,
    L2,
}

/// Penalized negative log-likelihood of a logistic model,
///
/// ```text
/// F(w, b) = sum_i [softplus(z_i) - y_i z_i] + P(w),   z_i = w.x_i + b
/// ```
///
/// with `P(w) = strength/2 * |w|^2` (L2) or `strength * |w|_1` (L1). The
/// intercept is never penalized. Parameters are packed as `[w_1..w_m, b]`.
pub struct LogisticObjective<'a> {
    pub x: &'a Matrix,
    pub y: &'a [f64],
    pub penalty: Penalty,
    pub strength: f64,
}

impl LogisticObjective<'_> {
    fn margins(&self, theta: &[f64]) -> Vec<f64> {
        let m = self.x.cols();
        self.x.row_iter().map(|r| dot(&theta[..m], r) + theta[m]).collect()
    }

    fn penalty_value(&self, w: &[f64]) -> f64 {
        match self.penalty {
            Penalty::L2 => 0.5 * self.strength * w.iter().map(|v| v * v).sum::<f64>(),
            Penalty::L1 => self.strength * w.iter().map(|v| v.abs()).sum::<f64>(),
        }
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        self.data_loss(&self.margins(theta)) + self.penalty_value(&theta[..self.x.cols()])
    }

    fn data_loss(&self, z: &[f64]) -> f64 {
        z.iter().zip(self.y).map(|(&z, &y)| softplus(z) - y * z).sum()
    }

    /// Gradient of the smooth part (the log-likelihood term).
    fn loss_gradient(&self, z: &[f64]) -> Vec<f64> {
        let m = self.x.cols();
        let mut g = vec![0.0; m + 1];
        for ((row, &zi), &yi) in self.x.row_iter().zip(z).zip(self.y) {
            let r = sigmoid(zi) - yi;
            for (gj, xj) in g[..m].iter_mut().zip(row) {
                *gj += r * xj;
            }
            g[m] += r;
        }
        g
    }

    /// Full gradient; for L1 the penalty contributes `strength * sign(w_j)`,
    /// which is the derivative wherever every `w_j` is non-zero.
    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let m = self.x.cols();
        let mut g = self.loss_gradient(&self.margins(theta));
        for j in 0..m {
            g[j] += match self.penalty {
                Penalty::L2 => self.strength * theta[j],
                Penalty::L1 => self.strength * sign(theta[j]),
            };
        }
        g
    }

    /// Largest violation of the optimality conditions (the subgradient
    /// condition at zero coefficients for L1).
    pub fn optimality_residual(&self, theta: &[f64]) -> f64 {
        let m = self.x.cols();
        let g = self.loss_gradient(&self.margins(theta));
        let mut worst = g[m].abs();
        for j in 0..m {
            let r = match self.penalty {
                Penalty::L2 => (g[j] + self.strength * theta[j]).abs(),
                Penalty::L1 if theta[j] != 0.0 => (g[j] + self.strength * sign(theta[j])).abs(),
                Penalty::L1 => (g[j].abs() - self.strength).max(0.0),
            };
            worst = worst.max(r);
        }
        worst
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Fitted logistic regression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub penalty: Penalty,
    pub converged: bool,
    pub iterations: usize,
}

impl Logistic {
    pub fn margin(&self, row: &[f64]) -> f64 {
        dot(&self.coefficients, row) + self.intercept
    }

    pub fn score_row(&self, row: &[f64]) -> f64 {
        sigmoid(self.margin(row))
    }

    fn from_theta(theta: Vec<f64>, penalty: Penalty, converged: bool, iterations: usize) -> Self {
        let mut coefficients = theta;
        let intercept = coefficients.pop().expect("theta includes the intercept");
        Self {
            coefficients,
            intercept,
            penalty,
            converged,
            iterations,
        }
    }
}

/// Residual tolerance, per row of data.
const TOL: f64 = 1e-6;

/// Minimizes [`LogisticObjective`]. L2 uses damped Newton steps, L1 uses
/// accelerated proximal gradient with restarts. Stops when the optimality
/// residual falls below `1e-6 * max(n, 1)` or after `max_iter` iterations
/// (reported through `converged`).
pub fn fit_logistic(x: &Matrix, y: &[f64], penalty: Penalty, strength: f64, max_iter: usize) -> Logistic {
    let obj = LogisticObjective {
        x,
        y,
        penalty,
        strength,
    };
    let tol = TOL * (x.rows().max(1) as f64);
    let (theta, converged, iters) = match penalty {
        Penalty::L2 => newton(&obj, tol, max_iter),
        Penalty::L1 => fista(&obj, tol, max_iter),
    };
    if !converged {
        log::warn!("logistic ({penalty:?}, strength {strength}) stopped after {iters} iterations without converging");
    }
    Logistic::from_theta(theta, penalty, converged, iters)
}

fn newton(obj: &LogisticObjective, tol: f64, max_iter: usize) -> (Vec<f64>, bool, usize) {
    let m = obj.x.cols();
    let d = m + 1;
    let mut theta = vec![0.0; d];
    let mut z = obj.margins(&theta);
    let mut f = obj.data_loss(&z) + obj.penalty_value(&theta[..m]);
    for it in 0..max_iter {
        let mut g = obj.loss_gradient(&z);
        for j in 0..m {
            g[j] += obj.strength * theta[j];
        }
        if g.iter().map(|v| v * v).sum::<f64>().sqrt() < tol {
            return (theta, true, it);
        }
        let mut h = vec![0.0; d * d];
        for (row, &zi) in obj.x.row_iter().zip(&z) {
            let p = sigmoid(zi);
            let wgt = p * (1.0 - p);
            for a in 0..d {
                let xa = if a < m { row[a] } else { 1.0 };
                let wa = wgt * xa;
                for b in 0..=a {
                    let xb = if b < m { row[b] } else { 1.0 };
                    h[a * d + b] += wa * xb;
                }
            }
        }
        let trace: f64 = (0..d).map(|a| h[a * d + a]).sum();
        for a in 0..d {
            for b in 0..a {
                h[b * d + a] = h[a * d + b];
            }
            if a < m {
                h[a * d + a] += obj.strength;
            }
            h[a * d + a] += 1e-12 * trace.max(1.0);
        }
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        let step = cholesky_solve(&h, &neg, d).unwrap_or(neg);
        let slope: f64 = dot(&g, &step);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let cz = obj.margins(&cand);
            let cf = obj.data_loss(&cz) + obj.penalty_value(&cand[..m]);
            if cf <= f + 1e-4 * t * slope {
                theta = cand;
                z = cz;
                f = cf;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // No further decrease is representable: accept the point if it is
            // within a looser tolerance.
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            return (theta, norm < 10.0 * tol, it + 1);
        }
    }
    (theta, false, max_iter)
}

/// Largest eigenvalue of `[X 1]'[X 1]` by power iteration, padded by 1%.
fn lipschitz_bound(x: &Matrix) -> f64 {
    let m = x.cols();
    let mut v = vec![1.0; m + 1];
    let mut lambda = 0.0;
    for _ in 0..50 {
        let mut out = vec![0.0; m + 1];
        for row in x.row_iter() {
            let s = dot(&v[..m], row) + v[m];
            for (o, xj) in out[..m].iter_mut().zip(row) {
                *o += s * xj;
            }
            out[m] += s;
        }
        let norm = out.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 1.0;
        }
        lambda = norm / v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v = out.iter().map(|a| a / norm).collect();
    }
    (lambda * 1.01).max(1e-12)
}

fn fista(obj: &LogisticObjective, tol: f64, max_iter: usize) -> (Vec<f64>, bool, usize) {
    let m = obj.x.cols();
    let step = 4.0 / lipschitz_bound(obj.x);
    let prox = |v: &mut [f64]| {
        for w in &mut v[..m] {
            *w = crate::stats::soft_threshold(*w, step * obj.strength);
        }
    };
    let mut theta = vec![0.0; m + 1];
    let mut y_pt = theta.clone();
    let mut t: f64 = 1.0;
    let mut f_prev = obj.value(&theta);
    for it in 0..max_iter {
        let g = obj.loss_gradient(&obj.margins(&y_pt));
        let mut next: Vec<f64> = y_pt.iter().zip(&g).map(|(a, gi)| a - step * gi).collect();
        prox(&mut next);
        let f_next = obj.value(&next);
        if f_next > f_prev {
            // Momentum overshot: restart from the last iterate.
            t = 1.0;
            y_pt.clone_from(&theta);
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y_pt = next.iter().zip(&theta).map(|(a, b)| a + beta * (a - b)).collect();
        theta = next;
        t = t_next;
        f_prev = f_next;
        if it % 10 == 9 && obj.optimality_residual(&theta) < tol {
            return (theta, true, it + 1);
        }
    }
    let ok = obj.optimality_residual(&theta) < tol;
    (theta, ok, max_iter)
}
