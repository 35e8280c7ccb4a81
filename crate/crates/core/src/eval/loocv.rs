//! Leave-one-out evaluation. Each fold selects features, fits the
//! standardiser, searches the grid and trains on its N-1 training rows
//! only, then scores the held-out row.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::labels::binarize_labels;
use super::questionnaire::QuestionnaireResponse;
use crate::error::{Error, Result};
use crate::features::{Engine, FeatureMatrix};
use crate::models::{grid_search, select_k_best, ExportedModel, train, Hyper, ModelKind, ModelSpec, SelectionResult, Standardizer, TrainedModel, INNER_FOLDS};

pub const DEFAULT_K: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub engine: Engine,
    pub session_ids: Vec<String>,
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Averaged questionnaire score per row.
    pub scores: Vec<f64>,
    pub labels: Vec<u8>,
    pub threshold: f64,
}

impl LabeledDataset {
    /// Aligns matrix rows with questionnaire responses by session id and
    /// binarises the scores of the matrix sessions. Responses for sessions
    /// absent from the matrix are ignored.
    pub fn from_matrix(matrix: &FeatureMatrix, responses: &[QuestionnaireResponse]) -> Result<Self> {
        let mut scores = Vec::with_capacity(matrix.n_rows());
        for row in &matrix.rows {
            let r = responses
                .iter()
                .find(|r| r.session_id == row.session_id)
                .ok_or_else(|| Error::Schema(format!("no questionnaire response for session {}", row.session_id)))?;
            scores.push(r.score());
        }
        let b = binarize_labels(&scores)?;
        Ok(Self {
            engine: matrix.engine,
            session_ids: matrix.rows.iter().map(|r| r.session_id.clone()).collect(),
            names: matrix.names.clone(),
            rows: matrix.values(),
            scores,
            labels: b.classes,
            threshold: b.threshold,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }
}

/// Where the ANOVA selection is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionScope {
    /// On each fold's training rows (no leakage).
    InFold,
    /// Once on all rows, held-out rows included. Leaks label information
    /// into the evaluation; kept only for comparison.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoocvConfig {
    pub k: usize,
    pub scope: SelectionScope,
    pub inner_folds: usize,
}

impl Default for LoocvConfig {
    fn default() -> Self {
        Self { k: DEFAULT_K, scope: SelectionScope::InFold, inner_folds: INNER_FOLDS }
    }
}

/// Everything one fold fitted. `model` is `None` when the training rows
/// hold a single class; the fold then predicts that class.
#[derive(Debug, Clone)]
pub struct FoldFit {
    pub indices: Vec<usize>,
    pub names: Vec<String>,
    pub standardizer: Option<Standardizer>,
    pub hyper: Option<Hyper>,
    pub model: Option<TrainedModel>,
    pub majority: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub session_id: String,
    pub label: u8,
    pub prediction: u8,
    pub score: f64,
    pub hyper: Option<Hyper>,
    pub degenerate: bool,
    pub selected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoocvResult {
    pub model: ModelKind,
    pub folds: Vec<FoldOutcome>,
}

impl LoocvResult {
    pub fn predictions(&self) -> Vec<u8> {
        self.folds.iter().map(|f| f.prediction).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.score).collect()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.folds.iter().map(|f| f.label).collect()
    }

    pub fn degenerate_sessions(&self) -> Vec<String> {
        self.folds.iter().filter(|f| f.degenerate).map(|f| f.session_id.clone()).collect()
    }
}

fn majority(y: &[u8]) -> u8 {
    let ones = y.iter().filter(|&&t| t == 1).count();
    u8::from(2 * ones > y.len())
}

/// Fits fold `holdout`. Only training rows reach selection, the
/// standardiser, the grid search and training, unless `scope` is
/// [`SelectionScope::Global`], in which case `global` supplies the columns.
pub fn fit_fold(ds: &LabeledDataset, holdout: usize, spec: &ModelSpec, cfg: &LoocvConfig, global: Option<&SelectionResult>) -> Result<FoldFit> {
    if holdout >= ds.len() {
        return Err(Error::invalid(format!("fold {holdout} outside {} rows", ds.len())));
    }
    let idx: Vec<usize> = (0..ds.len()).filter(|&i| i != holdout).collect();
    fit_rows(ds, &idx, spec, cfg, global)
}

/// The same fit on every row, for a model meant to be exported.
pub fn fit_all(ds: &LabeledDataset, spec: &ModelSpec, cfg: &LoocvConfig) -> Result<FoldFit> {
    spec.validate()?;
    let idx: Vec<usize> = (0..ds.len()).collect();
    let global = match cfg.scope {
        SelectionScope::Global => Some(select_k_best(&ds.rows, &ds.names, &ds.labels, cfg.k)?),
        SelectionScope::InFold => None,
    };
    fit_rows(ds, &idx, spec, cfg, global.as_ref())
}

fn fit_rows(ds: &LabeledDataset, idx: &[usize], spec: &ModelSpec, cfg: &LoocvConfig, global: Option<&SelectionResult>) -> Result<FoldFit> {
    let xtr: Vec<Vec<f64>> = idx.iter().map(|&i| ds.rows[i].clone()).collect();
    let ytr: Vec<u8> = idx.iter().map(|&i| ds.labels[i]).collect();
    let maj = majority(&ytr);
    if !(ytr.contains(&0) && ytr.contains(&1)) {
        return Ok(FoldFit { indices: Vec::new(), names: Vec::new(), standardizer: None, hyper: None, model: None, majority: maj });
    }
    let (indices, names, standardizer) = match (cfg.scope, global) {
        (SelectionScope::Global, Some(g)) => {
            let picked: Vec<Vec<f64>> = xtr.iter().map(|r| g.project_row(r)).collect();
            (g.indices.clone(), g.names.clone(), Standardizer::fit(&picked)?)
        }
        (SelectionScope::Global, None) => return Err(Error::invalid("global selection scope needs a fitted selection")),
        (SelectionScope::InFold, _) => {
            let s = select_k_best(&xtr, &ds.names, &ytr, cfg.k)?;
            (s.indices, s.names, s.standardizer)
        }
    };
    let z: Vec<Vec<f64>> = xtr.iter().map(|r| standardizer.apply_row(&indices.iter().map(|&j| r[j]).collect::<Vec<_>>())).collect();
    let hyper = grid_search(spec, &z, &ytr, cfg.inner_folds)?.best;
    let model = train(spec.kind, &hyper, spec.seed, &z, &ytr)?;
    Ok(FoldFit { indices, names, standardizer: Some(standardizer), hyper: Some(hyper), model: Some(model), majority: maj })
}

impl FoldFit {
    pub fn export(&self, kind: ModelKind) -> ExportedModel {
        ExportedModel {
            kind,
            hyperparameters: self.hyper,
            selected_features: self.names.clone(),
            standardization: self.standardizer.clone(),
            parameters: self.model.clone(),
            majority: self.majority,
        }
    }

    /// `(prediction, score)` for one raw feature row.
    pub fn predict_row(&self, row: &[f64]) -> (u8, f64) {
        match (&self.model, &self.standardizer) {
            (Some(m), Some(st)) => {
                let z = st.apply_row(&self.indices.iter().map(|&j| row[j]).collect::<Vec<_>>());
                let s = m.score(&z);
                (m.predict_from_score(s), s)
            }
            // Constant predictor; the score only has to rank, so the class value serves.
            _ => (self.majority, f64::from(self.majority)),
        }
    }
}

pub fn loocv(ds: &LabeledDataset, spec: &ModelSpec, cfg: &LoocvConfig) -> Result<LoocvResult> {
    spec.validate()?;
    if cfg.k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if ds.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: ds.len() });
    }
    let global = match cfg.scope {
        SelectionScope::Global => Some(select_k_best(&ds.rows, &ds.names, &ds.labels, cfg.k)?),
        SelectionScope::InFold => None,
    };
    let folds = (0..ds.len())
        .into_par_iter()
        .map(|i| {
            let fit = fit_fold(ds, i, spec, cfg, global.as_ref())?;
            let (prediction, score) = fit.predict_row(&ds.rows[i]);
            Ok(FoldOutcome {
                session_id: ds.session_ids[i].clone(),
                label: ds.labels[i],
                prediction,
                score,
                hyper: fit.hyper,
                degenerate: fit.model.is_none(),
                selected: fit.names,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LoocvResult { model: spec.kind, folds })
}
