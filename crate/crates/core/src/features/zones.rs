//! Zone-based handcrafted features: each channel is cut into 0.5 s windows,
//! window means are mapped to numbered value ranges, and the resulting zone
//! sequence is summarised.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::{max, mean, min, variance};
use super::FeatureSlice;
use crate::error::{Error, Result};
use crate::ingest::FPS;
use crate::metrics::{Channel, ChannelSet};

pub const MAX_ZONES: usize = 10;

/// How a channel's zone boundaries are obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ZoneSpec {
    /// Fixed, strictly increasing cut points; `len + 1` zones.
    Boundaries { boundaries: Vec<f64> },
    /// `zones` equal-width zones between two percentiles of the pooled corpus.
    Robust { zones: usize, lower_pct: f64, upper_pct: f64 },
}

impl ZoneSpec {
    pub fn zone_count(&self) -> usize {
        match self {
            ZoneSpec::Boundaries { boundaries } => boundaries.len() + 1,
            ZoneSpec::Robust { zones, .. } => *zones,
        }
    }

    fn robust(zones: usize) -> Self {
        ZoneSpec::Robust { zones, lower_pct: 1.0, upper_pct: 99.0 }
    }

    fn fixed(b: &[f64]) -> Self {
        ZoneSpec::Boundaries { boundaries: b.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelZones {
    #[serde(flatten)]
    pub spec: ZoneSpec,
    /// When set, samples are replaced by 1 (at or above) or 0 (below) before
    /// windowing. Raw-value statistics still use the original samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneConfig {
    pub window_s: f64,
    pub segment_count: usize,
    /// A trailing partial window shorter than this is merged into the
    /// previous one.
    pub min_tail_frames: usize,
    pub channels: BTreeMap<Channel, ChannelZones>,
}

impl Default for ZoneConfig {
    fn default() -> Self {
        use Channel::*;
        let orientation = ZoneSpec::fixed(&[-30.0, -10.0, 10.0, 30.0]);
        let mut channels = BTreeMap::new();
        for c in Channel::ALL {
            let spec = match c {
                HeadHeading | HeadPitch | HeadTilt | TrunkHeading | TrunkPitch | TrunkTilt => orientation.clone(),
                VelocityX | VelocityY | VelocityZ | Distance => ZoneSpec::robust(10),
                BodyWidth | BodyHeight | BodyDepth | HeadVertical | HeadSagittal => ZoneSpec::robust(5),
                ArmOpening => ZoneSpec::fixed(&[15.0, 30.0, 60.0, 90.0]),
                _ => ZoneSpec::fixed(&[0.2, 0.4, 0.6, 0.8]),
            };
            channels.insert(c, ChannelZones { spec, threshold: None });
        }
        Self { window_s: 0.5, segment_count: 5, min_tail_frames: 5, channels }
    }
}

fn check_boundaries(c: Channel, b: &[f64]) -> Result<()> {
    if b.len() + 1 > MAX_ZONES {
        return Err(Error::invalid(format!("{c}: at most {MAX_ZONES} zones")));
    }
    if b.iter().any(|v| !v.is_finite()) || b.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!("{c}: boundaries must be finite and strictly increasing")));
    }
    Ok(())
}

impl ZoneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_s > 0.0) || self.frames_per_window() == 0 {
            return Err(Error::invalid("window_s must cover at least one frame"));
        }
        if self.segment_count == 0 {
            return Err(Error::invalid("segment_count must be positive"));
        }
        for c in Channel::ALL {
            let cz = self.channels.get(&c).ok_or_else(|| Error::invalid(format!("zone config has no entry for {c}")))?;
            match &cz.spec {
                ZoneSpec::Boundaries { boundaries } => check_boundaries(c, boundaries)?,
                ZoneSpec::Robust { zones, lower_pct, upper_pct } => {
                    if *zones < 1 || *zones > MAX_ZONES {
                        return Err(Error::invalid(format!("{c}: zone count must be 1..={MAX_ZONES}")));
                    }
                    if !(0.0..100.0).contains(lower_pct) || !(*upper_pct > *lower_pct && *upper_pct <= 100.0) {
                        return Err(Error::invalid(format!("{c}: percentiles must satisfy 0 <= lower < upper <= 100")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn frames_per_window(&self) -> usize {
        (self.window_s * FPS).round() as usize
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ZoneConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("zone config serialises")
    }

    /// Number of features per channel: `8 + 6·Z` with the default 5 segments.
    pub fn features_per_channel(&self, c: Channel) -> usize {
        let z = self.channels[&c].spec.zone_count();
        4 + 1 + z + 1 + 2 + self.segment_count * z
    }

    pub fn feature_count(&self) -> usize {
        Channel::ALL.iter().map(|&c| self.features_per_channel(c)).sum()
    }

    pub fn feature_names(&self, c: Channel) -> Vec<String> {
        let z = self.channels[&c].spec.zone_count();
        let mut v: Vec<String> = ["mean", "min", "max", "std", "modal_zone"].iter().map(|s| s.to_string()).collect();
        v.extend((1..=z).map(|k| format!("zone_{k}_fraction")));
        v.extend(["zone_transitions", "longest_run", "shortest_run"].iter().map(|s| s.to_string()));
        for s in 1..=self.segment_count {
            v.extend((1..=z).map(|k| format!("segment_{s}_zone_{k}_fraction")));
        }
        v
    }

    /// Turns percentile specs into concrete boundaries using every
    /// non-missing sample of the channel across `sessions`. Labels are not
    /// consulted.
    pub fn resolve(&self, sessions: &[ChannelSet]) -> Result<ResolvedZones> {
        self.validate()?;
        let mut channels = BTreeMap::new();
        for (&c, cz) in &self.channels {
            let boundaries = match &cz.spec {
                ZoneSpec::Boundaries { boundaries } => boundaries.clone(),
                ZoneSpec::Robust { zones, lower_pct, upper_pct } => {
                    let mut pooled: Vec<f64> = sessions
                        .iter()
                        .flat_map(|s| {
                            let ch = s.channel(c);
                            ch.values.iter().zip(&ch.missing).filter(|(_, m)| !**m).map(|(v, _)| binarize(*v, cz.threshold)).collect::<Vec<_>>()
                        })
                        .collect();
                    pooled.sort_by(f64::total_cmp);
                    let (lo, hi) = if pooled.is_empty() {
                        (0.0, 1.0)
                    } else {
                        (percentile_sorted(&pooled, *lower_pct), percentile_sorted(&pooled, *upper_pct))
                    };
                    let width = if hi > lo { (hi - lo) / *zones as f64 } else { 1e-9 };
                    (1..*zones).map(|i| lo + width * i as f64).collect()
                }
            };
            check_boundaries(c, &boundaries)?;
            channels.insert(c, ResolvedChannel { boundaries, threshold: cz.threshold });
        }
        Ok(ResolvedZones {
            frames_per_window: self.frames_per_window(),
            min_tail_frames: self.min_tail_frames,
            segment_count: self.segment_count,
            channels,
        })
    }
}

/// Percentile with linear interpolation between order statistics.
fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    super::stats::quantile_sorted(sorted, p / 100.0)
}

fn binarize(v: f64, threshold: Option<f64>) -> f64 {
    match threshold {
        Some(t) => f64::from(u8::from(v >= t)),
        None => v,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedChannel {
    pub boundaries: Vec<f64>,
    pub threshold: Option<f64>,
}

/// A zone configuration with every boundary list fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedZones {
    pub frames_per_window: usize,
    pub min_tail_frames: usize,
    pub segment_count: usize,
    pub channels: BTreeMap<Channel, ResolvedChannel>,
}

/// Zone number (1-based) of `v`; a value on a boundary goes to the upper zone.
pub fn zone_of(v: f64, boundaries: &[f64]) -> usize {
    1 + boundaries.iter().filter(|&&b| b <= v).count()
}

/// Frame ranges of consecutive windows.
pub fn window_ranges(n: usize, frames_per_window: usize, min_tail: usize) -> Result<Vec<std::ops::Range<usize>>> {
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let full = n / frames_per_window;
    let mut out: Vec<_> = (0..full).map(|i| i * frames_per_window..(i + 1) * frames_per_window).collect();
    let rem = n % frames_per_window;
    if rem > 0 {
        match out.last_mut() {
            Some(last) if rem < min_tail => last.end = n,
            _ => out.push(full * frames_per_window..n),
        }
    }
    Ok(out)
}

/// Zone of each window's mean.
pub fn assign_zones(values: &[f64], boundaries: &[f64], frames_per_window: usize, min_tail: usize) -> Result<Vec<usize>> {
    Ok(window_ranges(values.len(), frames_per_window, min_tail)?.into_iter().map(|r| zone_of(mean(&values[r]), boundaries)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Runs {
    pub transitions: usize,
    pub longest: usize,
    pub shortest: usize,
}

pub fn run_lengths(zones: &[usize]) -> Runs {
    let mut lens = Vec::new();
    let mut cur = 1;
    for w in zones.windows(2) {
        if w[0] == w[1] {
            cur += 1;
        } else {
            lens.push(cur);
            cur = 1;
        }
    }
    if !zones.is_empty() {
        lens.push(cur);
    }
    Runs {
        transitions: lens.len().saturating_sub(1),
        longest: lens.iter().copied().max().unwrap_or(0),
        shortest: lens.iter().copied().min().unwrap_or(0),
    }
}

/// Zone features of one channel, named by [`ZoneConfig::feature_names`].
pub fn extract_zone_features(values: &[f64], ch: &ResolvedChannel, cfg: &ResolvedZones) -> Result<FeatureSlice> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let z = ch.boundaries.len() + 1;
    let mut out = FeatureSlice::with_capacity(8 + (1 + cfg.segment_count) * z);
    out.push(mean(values));
    out.push(min(values));
    out.push(max(values));
    out.push(variance(values).sqrt());

    let work: Vec<f64> = values.iter().map(|&v| binarize(v, ch.threshold)).collect();
    let zones = assign_zones(&work, &ch.boundaries, cfg.frames_per_window, cfg.min_tail_frames)?;
    let w = zones.len();
    let mut counts = vec![0usize; z];
    for &k in &zones {
        counts[k - 1] += 1;
    }
    // Lowest zone wins a tie for the mode.
    let top = *counts.iter().max().unwrap();
    out.push((counts.iter().position(|&c| c == top).unwrap() + 1) as f64);
    for c in &counts {
        out.push(*c as f64 / w as f64);
    }
    let runs = run_lengths(&zones);
    out.push(runs.transitions as f64);
    out.push(runs.longest as f64);
    out.push(runs.shortest as f64);

    let s_count = cfg.segment_count;
    let mut seg = vec![vec![0usize; z]; s_count];
    let mut seg_total = vec![0usize; s_count];
    for (i, &k) in zones.iter().enumerate() {
        let s = i * s_count / w;
        seg[s][k - 1] += 1;
        seg_total[s] += 1;
    }
    for s in 0..s_count {
        for k in 0..z {
            if seg_total[s] == 0 {
                out.push_flagged();
            } else {
                out.push(seg[s][k] as f64 / seg_total[s] as f64);
            }
        }
    }
    Ok(out)
}
