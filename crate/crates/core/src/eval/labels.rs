use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::stats::{quantile_sorted, sorted};

/// Percentile separating the low-satisfaction class.
pub const LOW_PERCENTILE: f64 = 33.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binarized {
    pub threshold: f64,
    /// 0 = low satisfaction, 1 = medium or high.
    pub classes: Vec<u8>,
}

/// Threshold is the 33rd percentile, linear interpolation at rank
/// `0.33·(n-1)` of the sorted scores; a score at or below it is class 0.
pub fn binarize_labels(scores: &[f64]) -> Result<Binarized> {
    if scores.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("satisfaction scores must be finite"));
    }
    let threshold = quantile_sorted(&sorted(scores), LOW_PERCENTILE / 100.0);
    Ok(Binarized { threshold, classes: scores.iter().map(|&s| u8::from(s > threshold)).collect() })
}
