use std::collections::HashSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use super::canonical22::{canonical22_feature_names, extract_canonical22};
use super::spectral::{extract_spectral, spectral_feature_names};
use super::zones::{extract_zone_features, ResolvedZones, ZoneConfig};
use super::{Engine, FeatureSlice};
use crate::error::{Error, Result};
use crate::metrics::{Channel, ChannelSet, SignalChannel};

/// Engine choice together with whatever configuration it needs.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineSpec {
    SpectralStat,
    Canonical22,
    Zones(ZoneConfig),
}

impl EngineSpec {
    pub fn engine(&self) -> Engine {
        match self {
            EngineSpec::SpectralStat => Engine::SpectralStat,
            EngineSpec::Canonical22 => Engine::Canonical22,
            EngineSpec::Zones(_) => Engine::Zones,
        }
    }

    fn channel_names(&self, c: Channel) -> Vec<String> {
        match self {
            EngineSpec::SpectralStat => spectral_feature_names(),
            EngineSpec::Canonical22 => canonical22_feature_names(),
            EngineSpec::Zones(z) => z.feature_names(c),
        }
    }

    /// Fully qualified `<channel>__<feature>` names in column order.
    pub fn catalog(&self) -> Vec<String> {
        Channel::ALL.iter().flat_map(|&c| self.channel_names(c).into_iter().map(move |f| format!("{}__{f}", c.name()))).collect()
    }
}

/// One session's row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub session_id: String,
    pub values: Vec<f64>,
    pub flagged: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub engine: Engine,
    pub names: Vec<String>,
    pub rows: Vec<FeatureVector>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn session_ids(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.session_id.as_str()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[j]).collect()
    }

    /// Row-major values.
    pub fn values(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.values.clone()).collect()
    }

    /// Rows reordered to follow `ids`; every id must be present.
    pub fn select_rows(&self, ids: &[&str]) -> Result<FeatureMatrix> {
        let rows = ids
            .iter()
            .map(|id| self.rows.iter().find(|r| r.session_id == *id).cloned().ok_or_else(|| Error::invalid(format!("session {id} not in feature matrix"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureMatrix { engine: self.engine, names: self.names.clone(), rows })
    }
}

fn channel_features(ch: &SignalChannel, spec: &EngineSpec, zones: Option<&ResolvedZones>, session: &str) -> Result<FeatureSlice> {
    let width = match spec {
        EngineSpec::SpectralStat => super::spectral::spectral_feature_count(),
        EngineSpec::Canonical22 => 22,
        EngineSpec::Zones(z) => z.features_per_channel(ch.channel),
    };
    if ch.is_empty() || ch.all_missing() {
        return Ok(FeatureSlice::all_flagged(width));
    }
    if ch.any_missing() {
        return Err(Error::invalid(format!("session {session}: channel {} has missing samples; preprocess before feature extraction", ch.channel)));
    }
    let out = match spec {
        EngineSpec::SpectralStat => extract_spectral(&ch.values),
        EngineSpec::Canonical22 => extract_canonical22(&ch.values),
        EngineSpec::Zones(_) => {
            let z = zones.expect("zones resolved");
            extract_zone_features(&ch.values, &z.channels[&ch.channel], z)?
        }
    };
    debug_assert_eq!(out.len(), width);
    Ok(out)
}

/// Rows follow the order of `sessions`; columns follow [`EngineSpec::catalog`].
/// Work is spread over sessions and channels; the assembled matrix does not
/// depend on scheduling.
pub fn build_feature_matrix(sessions: &[ChannelSet], spec: &EngineSpec) -> Result<FeatureMatrix> {
    let mut seen = HashSet::new();
    for s in sessions {
        s.validate().map_err(|e| Error::Schema(format!("session {}: {e}", s.session_id)))?;
        if !seen.insert(s.session_id.as_str()) {
            return Err(Error::Schema(format!("session {} appears twice", s.session_id)));
        }
    }
    let zones = match spec {
        EngineSpec::Zones(cfg) if !sessions.is_empty() => Some(cfg.resolve(sessions)?),
        EngineSpec::Zones(cfg) => {
            cfg.validate()?;
            None
        }
        _ => None,
    };
    let names = spec.catalog();
    let rows = sessions
        .par_iter()
        .map(|s| {
            let slices = s.channels.par_iter().map(|ch| channel_features(ch, spec, zones.as_ref(), &s.session_id)).collect::<Result<Vec<_>>>()?;
            let mut row = FeatureVector { session_id: s.session_id.clone(), values: Vec::with_capacity(names.len()), flagged: Vec::with_capacity(names.len()) };
            for sl in slices {
                row.values.extend(sl.values);
                row.flagged.extend(sl.flagged);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMatrix { engine: spec.engine(), names, rows })
}

/// CSV with a leading `# engine=<name>` line and a `session_id,<names>`
/// header. Values are written in shortest round-trip form; flags are not
/// stored (flagged entries are 0).
pub fn write_feature_matrix<W: Write>(mut w: W, m: &FeatureMatrix) -> std::io::Result<()> {
    writeln!(w, "# engine={}", m.engine)?;
    write!(w, "session_id")?;
    for n in &m.names {
        write!(w, ",{n}")?;
    }
    writeln!(w)?;
    for r in &m.rows {
        write!(w, "{}", r.session_id)?;
        for v in &r.values {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_feature_matrix<R: BufRead>(reader: R) -> Result<FeatureMatrix> {
    let mut engine = None;
    let mut names: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?;
        let t = line.trim_end();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(e) = rest.trim().strip_prefix("engine=") {
                engine = Some(e.parse::<Engine>().map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?);
            }
            continue;
        }
        let fields: Vec<&str> = t.split(',').collect();
        match &names {
            None => {
                if fields[0] != "session_id" {
                    return Err(Error::Format { line: line_no, msg: "header must start with session_id".into() });
                }
                names = Some(fields[1..].iter().map(|s| s.to_string()).collect());
            }
            Some(n) => {
                if fields.len() != n.len() + 1 {
                    return Err(Error::Format { line: line_no, msg: format!("expected {} fields, found {}", n.len() + 1, fields.len()) });
                }
                let values = fields[1..]
                    .iter()
                    .map(|s| s.parse::<f64>().map_err(|_| Error::Format { line: line_no, msg: format!("bad number {s:?}") }))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(FeatureVector { session_id: fields[0].to_string(), flagged: vec![false; values.len()], values });
            }
        }
    }
    let engine = engine.ok_or_else(|| Error::Format { line: 1, msg: "missing '# engine=' line".into() })?;
    let names = names.ok_or_else(|| Error::Format { line: 1, msg: "missing header".into() })?;
    Ok(FeatureMatrix { engine, names, rows })
}
