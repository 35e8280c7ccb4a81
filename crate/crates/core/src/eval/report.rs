use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::float_repr;
use super::loocv::{loocv, LabeledDataset, LoocvConfig, LoocvResult, SelectionScope};
use super::metrics::{compute_metrics, ClassificationMetrics};
use crate::error::Result;
use crate::features::Engine;
use crate::models::{anova_f, ModelKind, ModelSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeature {
    pub name: String,
    /// Folds that selected this feature.
    pub folds: usize,
    /// ANOVA over all rows; for reporting only.
    #[serde(with = "float_repr")]
    pub f_value: f64,
    #[serde(with = "float_repr")]
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub engine: Engine,
    pub model: ModelKind,
    pub metrics: ClassificationMetrics,
    /// Held-out sessions whose training rows had a single class.
    pub degenerate_folds: Vec<String>,
    /// How often each grid point won the inner search.
    pub hyper_choices: BTreeMap<String, usize>,
    /// Features chosen in at least one fold, most frequent first.
    pub features: Vec<SelectedFeature>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sessions: usize,
    pub class_counts: [usize; 2],
    pub threshold: f64,
    pub k: usize,
    pub scope: SelectionScope,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rows in engine then model order.
    pub fn sort_rows(&mut self) {
        self.rows.sort_by_key(|r| (r.engine, r.model));
    }
}

fn summarize_features(ds: &LabeledDataset, result: &LoocvResult) -> Vec<SelectedFeature> {
    let mut counts = vec![0usize; ds.names.len()];
    for f in &result.folds {
        for name in &f.selected {
            if let Some(j) = ds.names.iter().position(|n| n == name) {
                counts[j] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..counts.len()).filter(|&j| counts[j] > 0).collect();
    // Stable: equal counts keep catalog order.
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]));
    order
        .into_iter()
        .map(|j| {
            let col: Vec<f64> = ds.rows.iter().map(|r| r[j]).collect();
            let (f_value, p_value) = anova_f(&col, &ds.labels).unwrap_or((f64::NAN, f64::NAN));
            SelectedFeature { name: ds.names[j].clone(), folds: counts[j], f_value, p_value }
        })
        .collect()
}

/// Runs LOOCV for one model on one engine's dataset and summarises it.
pub fn evaluate_model(ds: &LabeledDataset, spec: &ModelSpec, cfg: &LoocvConfig) -> Result<ReportRow> {
    let result = loocv(ds, spec, cfg)?;
    let metrics = compute_metrics(&result.predictions(), &result.scores(), &result.labels())?;
    let mut hyper_choices = BTreeMap::new();
    for f in &result.folds {
        if let Some(h) = f.hyper {
            *hyper_choices.entry(h.to_string()).or_insert(0) += 1;
        }
    }
    Ok(ReportRow {
        engine: ds.engine,
        model: spec.kind,
        metrics,
        degenerate_folds: result.degenerate_sessions(),
        hyper_choices,
        features: summarize_features(ds, &result),
    })
}

fn two(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.2}")
    } else {
        "n/a".to_string()
    }
}

pub const REPORT_COLUMNS: [&str; 7] = ["Engine", "Model", "Precision", "Recall", "F1-Score", "Accuracy", "ROC-AUC"];

/// Markdown table, one row per (engine, model), metrics to two decimals and
/// accuracy in percent.
pub fn render_report(report: &EvalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "| {} |", REPORT_COLUMNS.join(" | "));
    let _ = writeln!(s, "|---|---|---:|---:|---:|---:|---:|");
    for r in &report.rows {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} |",
            r.engine,
            r.model.display_name(),
            two(m.precision),
            two(m.recall),
            two(m.f1),
            two(m.accuracy),
            two(m.roc_auc)
        );
    }
    s
}
