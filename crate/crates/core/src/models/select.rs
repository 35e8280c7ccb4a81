use serde::{Deserialize, Serialize};

use super::anova::anova_f;
use crate::error::{Error, Result};

/// Per-column mean and population standard deviation from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        };
        let d = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for j in 0..d {
                mean[j] += r[j];
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for r in rows {
            for j in 0..d {
                var[j] += (r[j] - mean[j]).powi(2);
            }
        }
        let std: Vec<f64> = var.iter().map(|v| (v / n).sqrt()).collect();
        if let Some(j) = std.iter().position(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::invalid(format!("column {j} has zero or undefined spread")));
        }
        Ok(Self { mean, std })
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(self.mean.iter().zip(&self.std)).map(|(x, (m, s))| (x - m) / s).collect()
    }

    pub fn apply(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply_row(r)).collect()
    }
}

/// `(x - mean) / std` with statistics fitted elsewhere.
pub fn standardize(rows: &[Vec<f64>], stats: &Standardizer) -> Vec<Vec<f64>> {
    stats.apply(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Column indices of the selected features, best first.
    pub indices: Vec<usize>,
    pub names: Vec<String>,
    /// F and p for every candidate column (NaN where undefined).
    pub f_values: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Fitted on the selected columns of the rows used for selection.
    pub standardizer: Standardizer,
}

impl SelectionResult {
    pub fn project_row(&self, row: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&j| row[j]).collect()
    }

    /// Selected columns of `rows`, standardised with the fitted statistics.
    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.standardizer.apply_row(&self.project_row(r))).collect()
    }
}

/// Picks the `k` columns with the largest F. Columns holding a non-finite
/// value, with undefined F, or with zero spread are not eligible. Ties keep
/// catalog order.
pub fn select_k_best(rows: &[Vec<f64>], names: &[String], labels: &[u8], k: usize) -> Result<SelectionResult> {
    if rows.len() != labels.len() {
        return Err(Error::invalid("rows and labels differ in length"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let d = names.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("row width differs from the feature name count"));
    }
    let mut f_values = vec![f64::NAN; d];
    let mut p_values = vec![f64::NAN; d];
    let mut eligible = Vec::new();
    let mut col = vec![0.0; rows.len()];
    for j in 0..d {
        for (i, r) in rows.iter().enumerate() {
            col[i] = r[j];
        }
        if col.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let (f, p) = anova_f(&col, labels)?;
        f_values[j] = f;
        p_values[j] = p;
        let spread = col.iter().any(|v| *v != col[0]);
        if !f.is_nan() && spread {
            eligible.push(j);
        }
    }
    if eligible.len() < k {
        return Err(Error::invalid(format!("only {} selectable features, {k} requested", eligible.len())));
    }
    // Stable sort on descending F keeps catalog order among ties.
    eligible.sort_by(|&a, &b| f_values[b].total_cmp(&f_values[a]));
    eligible.truncate(k);
    let picked: Vec<Vec<f64>> = rows.iter().map(|r| eligible.iter().map(|&j| r[j]).collect()).collect();
    let standardizer = Standardizer::fit(&picked)?;
    Ok(SelectionResult { names: eligible.iter().map(|&j| names[j].clone()).collect(), indices: eligible, f_values, p_values, standardizer })
}
