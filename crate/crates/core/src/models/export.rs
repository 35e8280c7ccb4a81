use serde::{Deserialize, Serialize};

use super::{Hyper, ModelKind, Standardizer, TrainedModel};
use crate::error::{Error, Result};

/// A fitted model with everything needed to score a raw feature row:
/// the selected feature names, their standardisation and the parameters.
/// A model fitted on single-class data has no parameters and predicts
/// `majority`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportedModel {
    pub kind: ModelKind,
    pub hyperparameters: Option<Hyper>,
    pub selected_features: Vec<String>,
    pub standardization: Option<Standardizer>,
    pub parameters: Option<TrainedModel>,
    pub majority: u8,
}

impl ExportedModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        if let Some(p) = &m.parameters {
            if p.kind() != m.kind {
                return Err(Error::Schema(format!("parameters are for {}, header says {}", p.kind(), m.kind)));
            }
        }
        if let Some(st) = &m.standardization {
            if st.mean.len() != m.selected_features.len() {
                return Err(Error::Schema("standardization and feature list differ in length".into()));
            }
        }
        Ok(m)
    }

    /// `(prediction, score)` for a row laid out as `names`.
    pub fn predict(&self, names: &[String], row: &[f64]) -> Result<(u8, f64)> {
        let (Some(model), Some(st)) = (&self.parameters, &self.standardization) else {
            return Ok((self.majority, f64::from(self.majority)));
        };
        let picked = self
            .selected_features
            .iter()
            .map(|f| names.iter().position(|n| n == f).map(|j| row[j]).ok_or_else(|| Error::Schema(format!("feature {f} not in matrix"))))
            .collect::<Result<Vec<f64>>>()?;
        let s = model.score(&st.apply_row(&picked));
        Ok((model.predict_from_score(s), s))
    }
}
