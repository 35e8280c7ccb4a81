use super::{CameraFrame, LandmarkPoint, FPS, NUM_LANDMARKS};
use crate::error::{Error, Result};

/// Frames closer than this (ms) to a grid point are copied, not blended.
const SNAP_MS: f64 = 1e-9;

/// Timestamp of grid frame `k` on the 30 Hz clock.
pub fn grid_timestamp(k: i64) -> f64 {
    k as f64 * 1000.0 / FPS
}

/// Nearest grid index for a timestamp.
pub fn frame_index(timestamp_ms: f64) -> i64 {
    (timestamp_ms * FPS / 1000.0).round() as i64
}

fn lerp(a: f64, b: f64, w: f64) -> f64 {
    a + w * (b - a)
}

fn blend(a: &CameraFrame, b: &CameraFrame, w: f64, ts: f64) -> CameraFrame {
    let mut landmarks = [LandmarkPoint::default(); NUM_LANDMARKS];
    for (out, (pa, pb)) in landmarks.iter_mut().zip(a.landmarks.iter().zip(&b.landmarks)) {
        *out = LandmarkPoint::new(
            lerp(pa.x, pb.x, w),
            lerp(pa.y, pb.y, w),
            lerp(pa.z, pb.z, w),
            lerp(pa.visibility, pb.visibility, w),
        );
    }
    let iris = match (a.iris_diameter_px, b.iris_diameter_px) {
        (Some(x), Some(y)) => Some(lerp(x, y, w)),
        _ => None,
    };
    CameraFrame { camera: a.camera, timestamp_ms: ts, landmarks, iris_diameter_px: iris }
}

/// Resamples one camera's frames onto the 30 Hz grid `k·1000/30` ms,
/// covering the grid points inside `[first, last]` timestamp. Each output
/// frame linearly interpolates the two input frames bracketing it.
pub fn resample_to_30fps(frames: &[CameraFrame]) -> Result<Vec<CameraFrame>> {
    if frames.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: frames.len() });
    }
    let t0 = frames[0].timestamp_ms;
    let t1 = frames[frames.len() - 1].timestamp_ms;
    let k_start = (t0 * FPS / 1000.0 - 1e-9).ceil() as i64;
    let k_end = (t1 * FPS / 1000.0 + 1e-9).floor() as i64;

    let mut out = Vec::with_capacity((k_end - k_start + 1).max(0) as usize);
    let mut j = 0;
    for k in k_start..=k_end {
        let t = grid_timestamp(k);
        while j + 1 < frames.len() && frames[j + 1].timestamp_ms <= t + SNAP_MS {
            j += 1;
        }
        let a = &frames[j];
        if (t - a.timestamp_ms).abs() <= SNAP_MS || j + 1 == frames.len() {
            let mut f = a.clone();
            f.timestamp_ms = t;
            out.push(f);
            continue;
        }
        let b = &frames[j + 1];
        let w = ((t - a.timestamp_ms) / (b.timestamp_ms - a.timestamp_ms)).clamp(0.0, 1.0);
        out.push(blend(a, b, w, t));
    }
    Ok(out)
}
