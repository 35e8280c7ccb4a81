//! Gaussian naive Bayes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub log_priors: [f64; 2],
    /// Absolute variance floor added to every class variance.
    pub epsilon: f64,
}

/// `var_smoothing` is relative to the largest feature variance, so the
/// added floor is `var_smoothing · max_j Var(x_j)`.
pub fn fit(x: &[Vec<f64>], y: &[u8], var_smoothing: f64) -> GaussianNb {
    let d = x.first().map_or(0, |r| r.len());
    let n = x.len() as f64;
    let mut max_var = 0.0f64;
    for j in 0..d {
        let m = x.iter().map(|r| r[j]).sum::<f64>() / n;
        max_var = max_var.max(x.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n);
    }
    let epsilon = var_smoothing * max_var;
    let mut means = [vec![0.0; d], vec![0.0; d]];
    let mut variances = [vec![0.0; d], vec![0.0; d]];
    let mut counts = [0usize; 2];
    for (r, &t) in x.iter().zip(y) {
        counts[t as usize] += 1;
        for j in 0..d {
            means[t as usize][j] += r[j];
        }
    }
    for c in 0..2 {
        for j in 0..d {
            means[c][j] /= counts[c] as f64;
        }
    }
    for (r, &t) in x.iter().zip(y) {
        for j in 0..d {
            variances[t as usize][j] += (r[j] - means[t as usize][j]).powi(2);
        }
    }
    for c in 0..2 {
        for j in 0..d {
            variances[c][j] = variances[c][j] / counts[c] as f64 + epsilon;
        }
    }
    let log_priors = [(counts[0] as f64 / n).ln(), (counts[1] as f64 / n).ln()];
    GaussianNb { means, variances, log_priors, epsilon }
}

impl GaussianNb {
    fn log_joint(&self, c: usize, row: &[f64]) -> f64 {
        let mut l = self.log_priors[c];
        for (j, x) in row.iter().enumerate() {
            let v = self.variances[c][j];
            l -= 0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (x - self.means[c][j]).powi(2) / v);
        }
        l
    }

    /// Posterior probability of class 1.
    pub fn score(&self, row: &[f64]) -> f64 {
        let a = self.log_joint(0, row);
        let b = self.log_joint(1, row);
        // 1 / (1 + e^(a-b)), written to avoid overflow.
        let z = b - a;
        super::logistic::sigmoid(z)
    }
}
