//! Feature selection, standardisation and the four classifiers.

pub mod anova;
pub mod bayes;
mod export;
pub mod forest;
mod grid;
pub mod logistic;
mod select;
pub mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use anova::anova_f;
pub use export::ExportedModel;
pub use forest::ForestParams;
pub use grid::{grid_search, stratified_folds, GridResult, INNER_FOLDS};
pub use select::{select_k_best, standardize, SelectionResult, Standardizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LogisticRegression,
    LinearSvm,
    GaussianNb,
    RandomForest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::LogisticRegression, ModelKind::LinearSvm, ModelKind::GaussianNb, ModelKind::RandomForest];

    pub fn key(self) -> &'static str {
        match self {
            ModelKind::LogisticRegression => "logistic_regression",
            ModelKind::LinearSvm => "linear_svm",
            ModelKind::GaussianNb => "gaussian_nb",
            ModelKind::RandomForest => "random_forest",
        }
    }

    /// Label used in report rows.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::LogisticRegression => "Logistic Regression",
            ModelKind::LinearSvm => "Support Vector Machine",
            ModelKind::GaussianNb => "Naive Bayes",
            ModelKind::RandomForest => "Random Forest",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL.into_iter().find(|k| k.key() == s).ok_or_else(|| Error::invalid(format!("unknown model {s:?}")))
    }
}

/// One point of a hyperparameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Hyper {
    /// Inverse regularisation strength for the linear models.
    Regularization { c: f64 },
    /// Naive Bayes variance floor relative to the largest feature variance.
    VarSmoothing { epsilon: f64 },
    Forest { trees: usize, max_depth: Option<usize> },
}

impl Hyper {
    /// Sort key, simplest model first: strongest regularisation, largest
    /// variance floor, shallowest and then smallest forest.
    fn complexity(&self) -> (f64, f64) {
        match *self {
            Hyper::Regularization { c } => (c, 0.0),
            Hyper::VarSmoothing { epsilon } => (-epsilon, 0.0),
            Hyper::Forest { trees, max_depth } => (max_depth.map_or(f64::INFINITY, |d| d as f64), trees as f64),
        }
    }

    fn fits(&self, kind: ModelKind) -> bool {
        matches!(
            (self, kind),
            (Hyper::Regularization { .. }, ModelKind::LogisticRegression | ModelKind::LinearSvm)
                | (Hyper::VarSmoothing { .. }, ModelKind::GaussianNb)
                | (Hyper::Forest { .. }, ModelKind::RandomForest)
        )
    }
}

impl fmt::Display for Hyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyper::Regularization { c } => write!(f, "C={c}"),
            Hyper::VarSmoothing { epsilon } => write!(f, "var_smoothing={epsilon}"),
            Hyper::Forest { trees, max_depth: Some(d) } => write!(f, "trees={trees},max_depth={d}"),
            Hyper::Forest { trees, max_depth: None } => write!(f, "trees={trees},max_depth=none"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub grid: Vec<Hyper>,
    /// Used by forests; carried by every spec so runs are fully described.
    pub seed: u64,
}

pub const DEFAULT_C_GRID: [f64; 4] = [0.01, 0.1, 1.0, 10.0];
pub const DEFAULT_VAR_SMOOTHING: f64 = 1e-9;
pub const DEFAULT_TREES: usize = 100;

impl ModelSpec {
    pub fn default_for(kind: ModelKind, seed: u64) -> Self {
        let grid = match kind {
            ModelKind::LogisticRegression | ModelKind::LinearSvm => DEFAULT_C_GRID.iter().map(|&c| Hyper::Regularization { c }).collect(),
            ModelKind::GaussianNb => vec![Hyper::VarSmoothing { epsilon: DEFAULT_VAR_SMOOTHING }],
            ModelKind::RandomForest => [Some(2), Some(4), None].into_iter().map(|d| Hyper::Forest { trees: DEFAULT_TREES, max_depth: d }).collect(),
        };
        Self { kind, grid, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid(format!("{}: hyperparameter grid is empty", self.kind)));
        }
        for h in &self.grid {
            if !h.fits(self.kind) {
                return Err(Error::invalid(format!("{}: grid entry {h} belongs to another model", self.kind)));
            }
            let ok = match *h {
                Hyper::Regularization { c } => c > 0.0 && c.is_finite(),
                Hyper::VarSmoothing { epsilon } => epsilon > 0.0 && epsilon.is_finite(),
                Hyper::Forest { trees, max_depth } => trees > 0 && max_depth != Some(0),
            };
            if !ok {
                return Err(Error::invalid(format!("{}: grid entry {h} must be positive", self.kind)));
            }
        }
        Ok(())
    }

    /// Grid entries from simplest to most complex; the sort is stable.
    pub fn ordered_grid(&self) -> Vec<Hyper> {
        let mut g = self.grid.clone();
        g.sort_by(|a, b| {
            let (x, y) = (a.complexity(), b.complexity());
            x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1))
        });
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "parameters")]
pub enum TrainedModel {
    LogisticRegression(logistic::LogisticModel),
    LinearSvm(svm::SvmModel),
    GaussianNb(bayes::GaussianNb),
    RandomForest(forest::Forest),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::LogisticRegression(_) => ModelKind::LogisticRegression,
            TrainedModel::LinearSvm(_) => ModelKind::LinearSvm,
            TrainedModel::GaussianNb(_) => ModelKind::GaussianNb,
            TrainedModel::RandomForest(_) => ModelKind::RandomForest,
        }
    }

    /// Class-1 probability (logistic, naive Bayes), signed margin (SVM) or
    /// fraction of trees voting class 1 (forest).
    pub fn score(&self, row: &[f64]) -> f64 {
        match self {
            TrainedModel::LogisticRegression(m) => m.score(row),
            TrainedModel::LinearSvm(m) => m.score(row),
            TrainedModel::GaussianNb(m) => m.score(row),
            TrainedModel::RandomForest(m) => m.score(row),
        }
    }

    pub fn decision_scores(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|r| self.score(r)).collect()
    }

    /// Score at or above the cut (0.5 for probabilities and votes, 0 for the
    /// SVM margin) predicts class 1.
    pub fn predict_from_score(&self, s: f64) -> u8 {
        let cut = if matches!(self, TrainedModel::LinearSvm(_)) { 0.0 } else { 0.5 };
        u8::from(s >= cut)
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<u8> {
        x.iter().map(|r| self.predict_from_score(self.score(r))).collect()
    }
}

fn check_training(x: &[Vec<f64>], y: &[u8]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid("rows and labels differ in length"));
    }
    if x.is_empty() {
        return Err(Error::InsufficientData { needed: 2, got: 0 });
    }
    if y.iter().any(|&t| t > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(Error::SingleClass);
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("training matrix holds non-finite values"));
    }
    Ok(())
}

pub fn train(kind: ModelKind, hyper: &Hyper, seed: u64, x: &[Vec<f64>], y: &[u8]) -> Result<TrainedModel> {
    check_training(x, y)?;
    if !hyper.fits(kind) {
        return Err(Error::invalid(format!("hyperparameter {hyper} does not apply to {kind}")));
    }
    Ok(match (kind, *hyper) {
        (ModelKind::LogisticRegression, Hyper::Regularization { c }) => TrainedModel::LogisticRegression(logistic::fit(x, y, c)),
        (ModelKind::LinearSvm, Hyper::Regularization { c }) => TrainedModel::LinearSvm(svm::fit(x, y, c)),
        (ModelKind::GaussianNb, Hyper::VarSmoothing { epsilon }) => TrainedModel::GaussianNb(bayes::fit(x, y, epsilon)),
        (ModelKind::RandomForest, Hyper::Forest { trees, max_depth }) => {
            TrainedModel::RandomForest(forest::fit(x, y, ForestParams { trees, max_depth, max_features: None, bootstrap: true, seed }))
        }
        _ => unreachable!("checked by fits()"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_models_fit_separable_toy_set() {
        // Two clusters four standard units apart.
        let x: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let s = if i < 10 { -2.0 } else { 2.0 };
                vec![s + 0.3 * ((i as f64) * 1.7).sin(), s + 0.3 * ((i as f64) * 0.9).cos()]
            })
            .collect();
        let y: Vec<u8> = (0..20).map(|i| u8::from(i >= 10)).collect();
        for kind in ModelKind::ALL {
            let spec = ModelSpec::default_for(kind, 1);
            for h in &spec.grid {
                let m = train(kind, h, 1, &x, &y).unwrap();
                assert_eq!(m.predict(&x), y, "{kind} {h}");
            }
        }
    }

    #[test]
    fn logistic_score_rises_with_informative_feature() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 - 15.0) / 8.0, ((i * 7) % 5) as f64 / 5.0]).collect();
        let y: Vec<u8> = (0..30).map(|i| u8::from(i >= 15)).collect();
        let m = train(ModelKind::LogisticRegression, &Hyper::Regularization { c: 1.0 }, 0, &x, &y).unwrap();
        let mut prev = 0.0;
        for k in -5..=5 {
            let s = m.score(&[k as f64, 0.5]);
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn single_class_and_bad_grid_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(matches!(train(ModelKind::GaussianNb, &Hyper::VarSmoothing { epsilon: 1e-9 }, 0, &x, &[1, 1]), Err(Error::SingleClass)));
        let mut spec = ModelSpec::default_for(ModelKind::LinearSvm, 0);
        spec.grid.push(Hyper::Regularization { c: -1.0 });
        assert!(spec.validate().is_err());
        spec.grid = vec![Hyper::VarSmoothing { epsilon: 1.0 }];
        assert!(spec.validate().is_err());
        spec.grid.clear();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 / 3.0, ((i * 5) % 7) as f64]).collect();
        let y: Vec<u8> = (0..12).map(|i| u8::from(i >= 6)).collect();
        for kind in ModelKind::ALL {
            let h = ModelSpec::default_for(kind, 4).grid[0];
            let m = train(kind, &h, 4, &x, &y).unwrap();
            let back: TrainedModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.decision_scores(&x), m.decision_scores(&x));
        }
    }

    #[test]
    fn grid_orders_simplest_first() {
        let spec = ModelSpec {
            kind: ModelKind::RandomForest,
            grid: vec![Hyper::Forest { trees: 100, max_depth: None }, Hyper::Forest { trees: 100, max_depth: Some(4) }, Hyper::Forest { trees: 100, max_depth: Some(2) }],
            seed: 0,
        };
        assert_eq!(spec.ordered_grid()[0], Hyper::Forest { trees: 100, max_depth: Some(2) });
        let lr = ModelSpec { kind: ModelKind::LogisticRegression, grid: vec![Hyper::Regularization { c: 10.0 }, Hyper::Regularization { c: 0.01 }], seed: 0 };
        assert_eq!(lr.ordered_grid()[0], Hyper::Regularization { c: 0.01 });
    }
}
