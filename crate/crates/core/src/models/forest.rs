//! Random forest of Gini-impurity decision trees.
//!
//! Bootstrap row indices and per-split feature subsets come from one
//! ChaCha8 stream seeded by the caller, drawn over row positions; row order
//! therefore matters and callers fix it (sessions are sorted by id).

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    /// `None` grows until leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    /// Features tried per split; `None` means `max(1, floor(√d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf { class: u8 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> u8 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class } => return *class,
                Node::Split { feature, threshold, left, right } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub params: ForestParams,
    pub trees: Vec<Tree>,
}

fn gini(c0: usize, c1: usize) -> f64 {
    let n = (c0 + c1) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = c0 as f64 / n;
    let p1 = c1 as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

/// Lowest weighted Gini over midpoints between consecutive distinct values
/// of one feature; the first (smallest) threshold wins ties.
fn best_split_on(x: &[Vec<f64>], y: &[u8], rows: &[usize], feature: usize) -> Option<(f64, f64)> {
    let mut order: Vec<(f64, u8)> = rows.iter().map(|&i| (x[i][feature], y[i])).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total1 = order.iter().filter(|p| p.1 == 1).count();
    let total0 = order.len() - total1;
    let n = order.len() as f64;
    let (mut l0, mut l1) = (0usize, 0usize);
    let mut best: Option<(f64, f64)> = None;
    for i in 0..order.len() - 1 {
        if order[i].1 == 1 {
            l1 += 1;
        } else {
            l0 += 1;
        }
        if order[i].0 == order[i + 1].0 {
            continue;
        }
        let nl = (l0 + l1) as f64;
        let imp = (nl * gini(l0, l1) + (n - nl) * gini(total0 - l0, total1 - l1)) / n;
        if best.is_none_or(|(b, _)| imp < b) {
            best = Some((imp, (order[i].0 + order[i + 1].0) / 2.0));
        }
    }
    best
}

fn grow(x: &[Vec<f64>], y: &[u8], rows: &[usize], depth: usize, p: &ForestParams, mtry: usize, rng: &mut ChaCha8Rng, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    let c1 = rows.iter().filter(|&&i| y[i] == 1).count();
    let c0 = rows.len() - c1;
    let leaf = Node::Leaf { class: u8::from(c1 > c0) };
    nodes.push(leaf.clone());
    if c0 == 0 || c1 == 0 || p.max_depth.is_some_and(|m| depth >= m) {
        return id;
    }
    let d = x[0].len();
    // All d features in random order; the first mtry are scored, and later
    // ones only while no splittable feature has been seen.
    let perm = sample(rng, d, d).into_vec();
    let mut feats = perm[..mtry.min(d)].to_vec();
    feats.sort_unstable();
    let mut best: Option<(f64, usize, f64)> = None;
    for f in feats.into_iter().chain(perm[mtry.min(d)..].iter().copied()) {
        if best.is_some() && !perm[..mtry.min(d)].contains(&f) {
            break;
        }
        if let Some((imp, thr)) = best_split_on(x, y, rows, f) {
            if best.is_none_or(|(b, _, _)| imp < b) {
                best = Some((imp, f, thr));
            }
        }
    }
    let Some((_, feature, threshold)) = best else {
        return id;
    };
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][feature] <= threshold);
    let left = grow(x, y, &l, depth + 1, p, mtry, rng, nodes);
    let right = grow(x, y, &r, depth + 1, p, mtry, rng, nodes);
    nodes[id] = Node::Split { feature, threshold, left, right };
    id
}

pub fn fit(x: &[Vec<f64>], y: &[u8], params: ForestParams) -> Forest {
    let n = x.len();
    let d = x.first().map_or(0, |r| r.len());
    let mtry = params.max_features.unwrap_or_else(|| ((d as f64).sqrt().floor() as usize).max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let trees = (0..params.trees)
        .map(|_| {
            let rows: Vec<usize> = if params.bootstrap { (0..n).map(|_| rng.gen_range(0..n)).collect() } else { (0..n).collect() };
            let mut nodes = Vec::new();
            grow(x, y, &rows, 0, &params, mtry, &mut rng, &mut nodes);
            Tree { nodes }
        })
        .collect();
    Forest { params, trees }
}

impl Forest {
    /// Fraction of trees voting class 1.
    pub fn score(&self, row: &[f64]) -> f64 {
        self.trees.iter().filter(|t| t.predict(row) == 1).count() as f64 / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use socialsig_oracles::best_gini_split;

    fn params(trees: usize, depth: Option<usize>, bootstrap: bool) -> ForestParams {
        ForestParams { trees, max_depth: depth, max_features: None, bootstrap, seed: 9 }
    }

    #[test]
    fn stump_threshold_matches_scan() {
        let x: Vec<Vec<f64>> = [0.3, 1.1, 0.7, 2.5, 3.0, 2.2, 0.1].iter().map(|v| vec![*v]).collect();
        let y = [0, 0, 0, 1, 1, 1, 0];
        let f = fit(&x, &y, params(1, Some(1), false));
        let Node::Split { threshold, .. } = f.trees[0].nodes[0] else { panic!("root should split") };
        let col: Vec<f64> = x.iter().map(|r| r[0]).collect();
        assert_eq!(Some(threshold), best_gini_split(&col, &y));
        assert!((threshold - 1.65).abs() < 1e-12);
    }

    #[test]
    fn unanimous_scores_are_extreme() {
        let x = vec![vec![-3.0, 0.0], vec![-2.0, 0.1], vec![-2.5, 0.2], vec![2.0, 0.0], vec![3.0, 0.3], vec![2.5, 0.1]];
        let y = [0, 0, 0, 1, 1, 1];
        let f = fit(&x, &y, ForestParams { max_features: Some(2), ..params(50, None, false) });
        assert_eq!(f.score(&[-10.0, 0.0]), 0.0);
        assert_eq!(f.score(&[10.0, 0.0]), 1.0);
    }

    #[test]
    fn falls_back_to_splittable_feature() {
        // Feature 0 is constant, so every split must use feature 1.
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![1.0, i as f64]).collect();
        let y = [0, 0, 0, 0, 1, 1, 1, 1];
        let f = fit(&x, &y, ForestParams { max_features: Some(1), ..params(10, None, false) });
        assert!(f.trees.iter().all(|t| matches!(t.nodes[0], Node::Split { feature: 1, .. })));
    }

    #[test]
    fn seeded_and_deterministic() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos(), i as f64 % 7.0]).collect();
        let y: Vec<u8> = (0..30).map(|i| u8::from(i % 3 == 0)).collect();
        assert_eq!(fit(&x, &y, params(20, Some(4), true)), fit(&x, &y, params(20, Some(4), true)));
    }

    proptest! {
        #[test]
        fn single_feature_stump_matches_oracle(v in prop::collection::vec((-5.0f64..5.0, 0u8..2), 3..40)) {
            let y: Vec<u8> = v.iter().map(|p| p.1).collect();
            prop_assume!(y.contains(&0) && y.contains(&1));
            let col: Vec<f64> = v.iter().map(|p| p.0).collect();
            let x: Vec<Vec<f64>> = col.iter().map(|c| vec![*c]).collect();
            let f = fit(&x, &y, params(1, Some(1), false));
            let got = match f.trees[0].nodes[0] {
                Node::Split { threshold, .. } => Some(threshold),
                Node::Leaf { .. } => None,
            };
            prop_assert_eq!(got, best_gini_split(&col, &y));
        }
    }
}
