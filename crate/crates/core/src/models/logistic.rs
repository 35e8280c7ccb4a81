//! L2-regularised logistic regression fitted by accelerated gradient descent.

use serde::{Deserialize, Serialize};

pub const GRAD_TOL: f64 = 1e-6;
pub const MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn margin(params: &[f64], row: &[f64]) -> f64 {
    let d = row.len();
    params[..d].iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + params[d]
}

/// Mean log-loss plus `‖w‖² / (2·C·n)`; `params` holds the weights followed
/// by the unpenalised bias.
pub fn objective(params: &[f64], x: &[Vec<f64>], y: &[u8], c: f64) -> f64 {
    let n = x.len() as f64;
    let d = params.len() - 1;
    let loss: f64 = x.iter().zip(y).map(|(r, &t)| {
        let z = margin(params, r);
        if t == 1 { softplus(-z) } else { softplus(z) }
    }).sum();
    let reg: f64 = params[..d].iter().map(|w| w * w).sum();
    loss / n + reg / (2.0 * c * n)
}

pub fn gradient(params: &[f64], x: &[Vec<f64>], y: &[u8], c: f64) -> Vec<f64> {
    let n = x.len() as f64;
    let d = params.len() - 1;
    let mut g = vec![0.0; d + 1];
    for (r, &t) in x.iter().zip(y) {
        let e = sigmoid(margin(params, r)) - t as f64;
        for j in 0..d {
            g[j] += e * r[j];
        }
        g[d] += e;
    }
    for j in 0..d {
        g[j] = g[j] / n + params[j] / (c * n);
    }
    g[d] /= n;
    g
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Nesterov-accelerated gradient descent with a fixed step `1/L` and
/// momentum restart whenever the objective would increase.
pub fn fit(x: &[Vec<f64>], y: &[u8], c: f64) -> LogisticModel {
    let n = x.len() as f64;
    let d = x.first().map_or(0, |r| r.len());
    // Lipschitz bound of the gradient: ‖[X 1]‖²_F / (4n) + 1/(Cn).
    let frob: f64 = x.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>() + 1.0).sum();
    let step = 1.0 / (frob / (4.0 * n) + 1.0 / (c * n));

    let mut p = vec![0.0; d + 1];
    let mut look = p.clone();
    let mut t = 1.0f64;
    let mut f_prev = objective(&p, x, y, c);
    for it in 0..MAX_ITER {
        let g_now = gradient(&p, x, y, c);
        if norm(&g_now) < GRAD_TOL {
            return LogisticModel { weights: p[..d].to_vec(), bias: p[d], iterations: it, converged: true };
        }
        let g = gradient(&look, x, y, c);
        let next: Vec<f64> = look.iter().zip(&g).map(|(a, b)| a - step * b).collect();
        let f_next = objective(&next, x, y, c);
        if f_next > f_prev {
            // Drop the momentum; the next pass takes a plain step from `p`.
            look.clone_from(&p);
            t = 1.0;
            continue;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_next;
        look = next.iter().zip(&p).map(|(a, b)| a + beta * (a - b)).collect();
        p = next;
        t = t_next;
        f_prev = f_next;
    }
    let converged = norm(&gradient(&p, x, y, c)) < GRAD_TOL;
    LogisticModel { weights: p[..d].to_vec(), bias: p[d], iterations: MAX_ITER, converged }
}

impl LogisticModel {
    /// Probability of class 1.
    pub fn score(&self, row: &[f64]) -> f64 {
        sigmoid(self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + self.bias)
    }
}
