use serde::{Deserialize, Serialize};

use super::{frame_index, CameraFrame, CameraId, NUM_LANDMARKS};
use crate::error::{Error, Result};

/// Gates applied per landmark when combining camera observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    /// Observations below this visibility are dropped.
    pub min_visibility: f64,
    /// Observations farther than this (normalized units) from the
    /// visibility-weighted centroid of the survivors are dropped.
    pub max_distance: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self { min_visibility: 0.5, max_distance: 0.15 }
    }
}

/// One fused 33-point pose.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedPose {
    pub points: [[f64; 3]; NUM_LANDMARKS],
    pub visibility: [f64; NUM_LANDMARKS],
    pub valid: [bool; NUM_LANDMARKS],
}

impl FusedPose {
    pub fn invalid() -> Self {
        Self { points: [[0.0; 3]; NUM_LANDMARKS], visibility: [0.0; NUM_LANDMARKS], valid: [false; NUM_LANDMARKS] }
    }

    pub fn point(&self, i: usize) -> Option<[f64; 3]> {
        self.valid[i].then_some(self.points[i])
    }
}

/// Fused poses on the 30 Hz grid; `frames[k]` sits at `k·1000/30` ms.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedPoseSeries {
    pub frames: Vec<FusedPose>,
    /// Front-camera iris diameter per frame, when reported.
    pub iris_px: Vec<Option<f64>>,
}

impl FusedPoseSeries {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

fn sq_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

fn weighted_mean(obs: &[([f64; 3], f64)]) -> ([f64; 3], f64) {
    let mut acc = [0.0; 3];
    let mut wsum = 0.0;
    for (p, w) in obs {
        for d in 0..3 {
            acc[d] += w * p[d];
        }
        wsum += w;
    }
    ([acc[0] / wsum, acc[1] / wsum, acc[2] / wsum], wsum)
}

fn fuse_landmark(obs: &[([f64; 3], f64)], cfg: &FusionConfig) -> Option<([f64; 3], f64)> {
    let survivors: Vec<([f64; 3], f64)> = obs.iter().copied().filter(|(_, v)| *v >= cfg.min_visibility && *v > 0.0).collect();
    if survivors.is_empty() {
        return None;
    }
    let (centroid, _) = weighted_mean(&survivors);
    let max_sq = cfg.max_distance * cfg.max_distance;
    let kept: Vec<([f64; 3], f64)> = survivors.into_iter().filter(|(p, _)| sq_dist(*p, centroid) <= max_sq).collect();
    if kept.is_empty() {
        return None;
    }
    if let [only] = kept.as_slice() {
        return Some(*only);
    }
    let (mean, wsum) = weighted_mean(&kept);
    Some((mean, wsum / kept.len() as f64))
}

/// Combines up to three resampled, rotated camera tracks into one pose per
/// grid frame. Tracks are processed in camera-id order regardless of the
/// order given, so the result does not depend on argument order. Grid
/// frames not covered by a track count as invalid observations.
pub fn fuse_poses(tracks: &[Vec<CameraFrame>], cfg: &FusionConfig) -> Result<FusedPoseSeries> {
    if tracks.is_empty() {
        return Err(Error::invalid("fusion needs at least one camera track"));
    }
    let mut indexed: Vec<(CameraId, Vec<(i64, &CameraFrame)>)> = Vec::with_capacity(tracks.len());
    for track in tracks {
        let Some(first) = track.first() else { continue };
        let cam = first.camera;
        if track.iter().any(|f| f.camera != cam) {
            return Err(Error::invalid("a fusion track mixes cameras"));
        }
        if indexed.iter().any(|(c, _)| *c == cam) {
            return Err(Error::invalid(format!("camera {cam} supplied twice")));
        }
        indexed.push((cam, track.iter().map(|f| (frame_index(f.timestamp_ms), f)).collect()));
    }
    indexed.sort_by_key(|(c, _)| *c);

    let last = indexed.iter().filter_map(|(_, t)| t.last().map(|(k, _)| *k)).max().unwrap_or(-1);
    let len = (last + 1).max(0) as usize;
    let mut frames = Vec::with_capacity(len);
    let mut iris_px = vec![None; len];
    let mut cursors = vec![0usize; indexed.len()];
    let mut at_k: Vec<Option<&CameraFrame>> = vec![None; indexed.len()];

    for k in 0..len as i64 {
        for (ti, (_, track)) in indexed.iter().enumerate() {
            while cursors[ti] < track.len() && track[cursors[ti]].0 < k {
                cursors[ti] += 1;
            }
            at_k[ti] = match track.get(cursors[ti]) {
                Some((kk, f)) if *kk == k => Some(*f),
                _ => None,
            };
        }
        let mut pose = FusedPose::invalid();
        let mut obs: Vec<([f64; 3], f64)> = Vec::with_capacity(3);
        for lm in 0..NUM_LANDMARKS {
            obs.clear();
            for f in at_k.iter().flatten() {
                let p = &f.landmarks[lm];
                obs.push((p.coords(), p.visibility));
            }
            if let Some((p, v)) = fuse_landmark(&obs, cfg) {
                pose.points[lm] = p;
                pose.visibility[lm] = v;
                pose.valid[lm] = true;
            }
        }
        for (ti, (cam, _)) in indexed.iter().enumerate() {
            if *cam == CameraId::Front {
                iris_px[k as usize] = at_k[ti].and_then(|f| f.iris_diameter_px);
            }
        }
        frames.push(pose);
    }
    Ok(FusedPoseSeries { frames, iris_px })
}
