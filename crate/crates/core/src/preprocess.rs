//! Main-phase trimming, gap repair and smoothing of channel sets.

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{ChannelSet, SignalChannel};

/// Default smoothing window in frames (about 167 ms at 30 Hz).
pub const DEFAULT_SMOOTH_WINDOW: usize = 5;

/// Inclusive frame bounds of the main interaction phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseMarkers {
    pub start: usize,
    pub end: usize,
}

impl PhaseMarkers {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.start >= self.end || self.end >= len {
            return Err(Error::invalid(format!(
                "phase markers [{}, {}] invalid for a {len}-frame session",
                self.start, self.end
            )));
        }
        Ok(())
    }
}

pub fn trim_main_phase(set: &ChannelSet, markers: PhaseMarkers) -> Result<ChannelSet> {
    markers.validate(set.len())?;
    let r = markers.start..markers.end + 1;
    Ok(set.map_channels(|c| SignalChannel {
        channel: c.channel,
        values: c.values[r.clone()].to_vec(),
        missing: c.missing[r.clone()].to_vec(),
    }))
}

/// Fills interior gaps linearly between the bounding valid samples and
/// extends the first/last valid sample over leading/trailing gaps. A
/// channel with no valid sample is returned unchanged (still all missing).
pub fn interpolate_missing(channel: &SignalChannel) -> SignalChannel {
    let valid: Vec<usize> = (0..channel.len()).filter(|&i| !channel.missing[i]).collect();
    let (Some(&first), Some(&last)) = (valid.first(), valid.last()) else {
        return channel.clone();
    };
    let v = &channel.values;
    let mut values = v.clone();
    for slot in values.iter_mut().take(first) {
        *slot = v[first];
    }
    for slot in values.iter_mut().skip(last + 1) {
        *slot = v[last];
    }
    for pair in valid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let span = (b - a) as f64;
        for (t, slot) in values.iter_mut().enumerate().take(b).skip(a + 1) {
            let w = (t - a) as f64 / span;
            *slot = v[a] + w * (v[b] - v[a]);
        }
    }
    SignalChannel { channel: channel.channel, values, missing: vec![false; channel.len()] }
}

/// Centered moving average over an odd window; near the edges the mean is
/// taken over the part of the window that exists. Missing samples are
/// skipped in the averages and stay flagged.
pub fn smooth(channel: &SignalChannel, window: usize) -> Result<SignalChannel> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::invalid(format!("smoothing window must be odd and positive, got {window}")));
    }
    if window == 1 {
        return Ok(channel.clone());
    }
    let n = channel.len();
    let half = window / 2;
    // Prefix counts of valid samples.
    let mut cnt = vec![0usize; n + 1];
    for i in 0..n {
        cnt[i + 1] = cnt[i] + usize::from(!channel.missing[i]);
    }
    let values = (0..n)
        .map(|i| {
            if channel.missing[i] {
                return channel.values[i];
            }
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let mut acc = 0.0;
            for j in lo..hi {
                if !channel.missing[j] {
                    acc += channel.values[j];
                }
            }
            acc / (cnt[hi] - cnt[lo]) as f64
        })
        .collect();
    Ok(SignalChannel { channel: channel.channel, values, missing: channel.missing.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub smooth_window: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self { smooth_window: DEFAULT_SMOOTH_WINDOW }
    }
}

/// Trim (when markers are given), interpolate, then smooth every channel.
pub fn preprocess(set: &ChannelSet, markers: Option<PhaseMarkers>, cfg: &PreprocessConfig) -> Result<ChannelSet> {
    let trimmed = match markers {
        Some(m) => trim_main_phase(set, m)?,
        None => set.clone(),
    };
    let channels = trimmed
        .channels
        .iter()
        .map(|c| smooth(&interpolate_missing(c), cfg.smooth_window))
        .collect::<Result<Vec<_>>>()?;
    ChannelSet::new(trimmed.session_id, channels)
}

/// Markers file: `session_id,start_frame,end_frame` per line, `#` comments.
pub fn parse_markers<R: BufRead>(reader: R) -> Result<HashMap<String, PhaseMarkers>> {
    let mut out = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split(',').map(str::trim).collect();
        if f.len() != 3 {
            return Err(Error::Format { line: line_no, msg: "expected session_id,start,end".into() });
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Format { line: line_no, msg: format!("bad frame index {s:?}") });
        let m = PhaseMarkers::new(num(f[1])?, num(f[2])?);
        if m.start >= m.end {
            return Err(Error::Format { line: line_no, msg: "end must exceed start".into() });
        }
        if out.insert(f[0].to_string(), m).is_some() {
            return Err(Error::Format { line: line_no, msg: format!("duplicate session {}", f[0]) });
        }
    }
    Ok(out)
}

pub fn format_markers<'a>(entries: impl IntoIterator<Item = (&'a str, PhaseMarkers)>) -> String {
    let mut s = String::from("# session_id,start_frame,end_frame\n");
    for (id, m) in entries {
        s.push_str(&format!("{id},{},{}\n", m.start, m.end));
    }
    s
}
