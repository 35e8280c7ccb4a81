use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use socialsig_core::{Error, Result};

pub const FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage_version: u32,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub config: Value,
    pub outputs: Vec<String>,
}

/// One per output directory; each stage replaces its own entry and leaves
/// the others alone. No timestamps, so reruns write identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub stages: BTreeMap<String, StageRecord>,
}

/// SHA-256 of the compact JSON form. `Value` objects keep keys sorted, so
/// field order in the source struct does not matter.
pub fn config_hash(config: &Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn record<C: Serialize>(dir: &Path, stage: &str, version: u32, seed: Option<u64>, config: &C, outputs: Vec<String>) -> Result<()> {
    let path = dir.join(FILE);
    let mut manifest = match fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Manifest { tool_version: String::new(), stages: BTreeMap::new() },
        Err(e) => return Err(Error::io(&path, e)),
    };
    manifest.tool_version = env!("CARGO_PKG_VERSION").to_string();
    let config = serde_json::to_value(config)?;
    let config_hash = config_hash(&config);
    manifest.stages.insert(stage.to_string(), StageRecord { stage_version: version, config_hash, seed, config, outputs });
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
