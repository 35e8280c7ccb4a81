use super::{train, Hyper, ModelSpec};
use crate::error::{Error, Result};

/// Inner folds used for hyperparameter search.
pub const INNER_FOLDS: usize = 3;

/// Fold number of every row: within each class, rows in order are dealt to
/// folds `0, 1, .., k-1, 0, ..`.
pub fn stratified_folds(y: &[u8], k: usize) -> Vec<usize> {
    let mut seen = [0usize; 2];
    y.iter()
        .map(|&t| {
            let f = seen[t as usize] % k;
            seen[t as usize] += 1;
            f
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: Hyper,
    /// `(hyperparameters, mean inner-fold accuracy)` in the order tried.
    pub scores: Vec<(Hyper, f64)>,
}

fn majority(y: &[u8]) -> u8 {
    let ones = y.iter().filter(|&&t| t == 1).count();
    u8::from(2 * ones > y.len())
}

/// Mean accuracy over inner stratified folds; folds whose training part
/// holds a single class predict that class.
fn inner_accuracy(spec: &ModelSpec, h: &Hyper, x: &[Vec<f64>], y: &[u8], folds: &[usize], k: usize) -> Result<f64> {
    let mut total = 0.0;
    let mut used = 0;
    for f in 0..k {
        let (mut xtr, mut ytr, mut xte, mut yte) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for i in 0..x.len() {
            if folds[i] == f {
                xte.push(x[i].clone());
                yte.push(y[i]);
            } else {
                xtr.push(x[i].clone());
                ytr.push(y[i]);
            }
        }
        if xte.is_empty() || xtr.is_empty() {
            continue;
        }
        let pred = if ytr.contains(&0) && ytr.contains(&1) {
            train(spec.kind, h, spec.seed, &xtr, &ytr)?.predict(&xte)
        } else {
            vec![majority(&ytr); xte.len()]
        };
        total += pred.iter().zip(&yte).filter(|(a, b)| a == b).count() as f64 / yte.len() as f64;
        used += 1;
    }
    if used == 0 {
        return Err(Error::InsufficientData { needed: 2, got: x.len() });
    }
    Ok(total / used as f64)
}

/// Exhaustive search scored on the given rows only; the first grid point in
/// simplicity order wins ties.
pub fn grid_search(spec: &ModelSpec, x: &[Vec<f64>], y: &[u8], k: usize) -> Result<GridResult> {
    spec.validate()?;
    let grid = spec.ordered_grid();
    if grid.len() == 1 {
        return Ok(GridResult { best: grid[0], scores: vec![(grid[0], f64::NAN)] });
    }
    let folds = stratified_folds(y, k);
    let mut scores = Vec::with_capacity(grid.len());
    let mut best: Option<(Hyper, f64)> = None;
    for h in grid {
        let acc = inner_accuracy(spec, &h, x, y, &folds, k)?;
        scores.push((h, acc));
        if best.is_none_or(|(_, b)| acc > b) {
            best = Some((h, acc));
        }
    }
    Ok(GridResult { best: best.expect("non-empty grid").0, scores })
}
