use serde::{Deserialize, Serialize};

use super::float_repr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    /// Macro averages over the two classes.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Percent correct.
    pub accuracy: f64,
    /// NaN when only one class is present.
    #[serde(with = "float_repr")]
    pub roc_auc: f64,
    /// `confusion[true_class][predicted_class]`.
    pub confusion: [[usize; 2]; 2],
    /// Per-class metrics whose denominator was zero (set to 0).
    pub flags: Vec<String>,
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half; computed from mid-ranks. `None` without both classes.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let n1 = labels.iter().filter(|&&l| l == 1).count();
    let n0 = labels.len() - n1;
    if n1 == 0 || n0 == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum keeps mid-ranks integral.
    let mut rank2_pos: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid2 = (i + 1 + j + 1) as u64;
        rank2_pos += mid2 * order[i..=j].iter().filter(|&&k| labels[k] == 1).count() as u64;
        i = j + 1;
    }
    let u2 = rank2_pos - (n1 * (n1 + 1)) as u64;
    Some(u2 as f64 / (2 * n1 * n0) as f64)
}

pub fn compute_metrics(predictions: &[u8], scores: &[f64], labels: &[u8]) -> Result<ClassificationMetrics> {
    let n = labels.len();
    if predictions.len() != n || scores.len() != n {
        return Err(Error::invalid("predictions, scores and labels differ in length"));
    }
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if labels.iter().chain(predictions).any(|&v| v > 1) {
        return Err(Error::invalid("classes must be 0 or 1"));
    }
    let mut confusion = [[0usize; 2]; 2];
    for (&t, &p) in labels.iter().zip(predictions) {
        confusion[t as usize][p as usize] += 1;
    }
    let mut flags = Vec::new();
    let mut ratio = |num: usize, den: usize, what: String| {
        if den == 0 {
            flags.push(what);
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let mut prec = [0.0; 2];
    let mut rec = [0.0; 2];
    for c in 0..2 {
        let tp = confusion[c][c];
        prec[c] = ratio(tp, confusion[0][c] + confusion[1][c], format!("precision of class {c} undefined"));
        rec[c] = ratio(tp, confusion[c][0] + confusion[c][1], format!("recall of class {c} undefined"));
    }
    let mut f1 = [0.0; 2];
    for c in 0..2 {
        let s = prec[c] + rec[c];
        if s == 0.0 {
            flags.push(format!("f1 of class {c} undefined"));
        } else {
            f1[c] = 2.0 * prec[c] * rec[c] / s;
        }
    }
    let correct = confusion[0][0] + confusion[1][1];
    Ok(ClassificationMetrics {
        precision: (prec[0] + prec[1]) / 2.0,
        recall: (rec[0] + rec[1]) / 2.0,
        f1: (f1[0] + f1[1]) / 2.0,
        accuracy: 100.0 * correct as f64 / n as f64,
        roc_auc: roc_auc(scores, labels).unwrap_or(f64::NAN),
        confusion,
        flags,
    })
}
