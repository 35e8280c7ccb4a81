//! Linear support vector machine: L2-regularised hinge loss minimised by
//! full-batch subgradient descent on a fixed step schedule.

use serde::{Deserialize, Serialize};

pub const ITERATIONS: usize = 3000;
const STEP0: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sign(t: u8) -> f64 {
    if t == 1 { 1.0 } else { -1.0 }
}

/// `λ/2·‖w‖² + mean hinge`, with `λ = 1/(C·n)`.
pub fn objective(w: &[f64], b: f64, x: &[Vec<f64>], y: &[u8], c: f64) -> f64 {
    let n = x.len() as f64;
    let lambda = 1.0 / (c * n);
    let hinge: f64 = x
        .iter()
        .zip(y)
        .map(|(r, &t)| (1.0 - sign(t) * (w.iter().zip(r).map(|(a, v)| a * v).sum::<f64>() + b)).max(0.0))
        .sum();
    0.5 * lambda * w.iter().map(|a| a * a).sum::<f64>() + hinge / n
}

/// Step `STEP0/√t`; the best iterate by objective is kept.
pub fn fit(x: &[Vec<f64>], y: &[u8], c: f64) -> SvmModel {
    let n = x.len() as f64;
    let d = x.first().map_or(0, |r| r.len());
    let lambda = 1.0 / (c * n);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut best = (objective(&w, b, x, y, c), w.clone(), b);
    let mut gw = vec![0.0; d];
    for t in 1..=ITERATIONS {
        gw.iter_mut().zip(&w).for_each(|(g, a)| *g = lambda * a);
        let mut gb = 0.0;
        for (r, &lab) in x.iter().zip(y) {
            let s = sign(lab);
            let m = s * (w.iter().zip(r).map(|(a, v)| a * v).sum::<f64>() + b);
            if m < 1.0 {
                for j in 0..d {
                    gw[j] -= s * r[j] / n;
                }
                gb -= s / n;
            }
        }
        let eta = STEP0 / (t as f64).sqrt();
        for j in 0..d {
            w[j] -= eta * gw[j];
        }
        b -= eta * gb;
        let f = objective(&w, b, x, y, c);
        if f < best.0 {
            best = (f, w.clone(), b);
        }
    }
    SvmModel { weights: best.1, bias: best.2 }
}

impl SvmModel {
    /// Signed margin.
    pub fn score(&self, row: &[f64]) -> f64 {
        self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }
}
