//! Per-channel feature engines and the session × feature matrix.

pub mod canonical22;
pub mod fft;
mod matrix;
pub mod spectral;
pub mod stats;
pub mod zones;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use canonical22::{extract_canonical22, fluctuation_curve, Fluct, FluctuationCurve, CANONICAL22};
pub use fft::{fft, Complex};
pub use matrix::{build_feature_matrix, read_feature_matrix, write_feature_matrix, EngineSpec, FeatureMatrix, FeatureVector};
pub use spectral::extract_spectral;
pub use zones::{assign_zones, extract_zone_features, ResolvedZones, ZoneConfig, ZoneSpec};

/// Values for one channel plus a not-computable flag per entry. Flagged
/// entries always hold 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureSlice {
    pub values: Vec<f64>,
    pub flagged: Vec<bool>,
}

impl FeatureSlice {
    pub fn with_capacity(n: usize) -> Self {
        Self { values: Vec::with_capacity(n), flagged: Vec::with_capacity(n) }
    }

    pub fn all_flagged(n: usize) -> Self {
        Self { values: vec![0.0; n], flagged: vec![true; n] }
    }

    pub fn push(&mut self, v: f64) {
        self.values.push(v);
        self.flagged.push(false);
    }

    pub fn push_flagged(&mut self) {
        self.values.push(0.0);
        self.flagged.push(true);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    SpectralStat,
    Canonical22,
    Zones,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::SpectralStat, Engine::Canonical22, Engine::Zones];

    pub fn name(self) -> &'static str {
        match self {
            Engine::SpectralStat => "spectral_stat",
            Engine::Canonical22 => "canonical22",
            Engine::Zones => "zones",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Engine::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::invalid(format!("unknown engine {s:?}")))
    }
}
