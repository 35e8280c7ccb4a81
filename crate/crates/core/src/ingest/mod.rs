//! Per-camera landmark streams: parsing, 30 Hz resampling, rotation into the
//! common body frame and multi-camera fusion.
//!
//! Common body frame: `x` points to the user's left (image right when the
//! user faces the front camera), `y` grows downward, `z` points from the user
//! towards the robot. Coordinates are in the extractor's normalized units.

mod calibration;
mod fuse;
mod resample;
mod stream;

pub use calibration::{mat_mul, mat_vec, rotate_camera_frame, yaw_matrix, CalibrationSet, CameraCalibration, Matrix3, IDENTITY};
pub use fuse::{fuse_poses, FusedPose, FusedPoseSeries, FusionConfig};
pub use resample::{frame_index, grid_timestamp, resample_to_30fps};
pub use stream::{parse_landmark_stream, write_landmark_stream, LandmarkStream};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Number of body landmarks produced by the pose extractor.
pub const NUM_LANDMARKS: usize = 33;

/// Output frame rate of every resampled or fused series.
pub const FPS: f64 = 30.0;

/// Named indices into the 33-point pose.
pub mod idx {
    pub const NOSE: usize = 0;
    pub const LEFT_EAR: usize = 7;
    pub const RIGHT_EAR: usize = 8;
    pub const LEFT_SHOULDER: usize = 11;
    pub const RIGHT_SHOULDER: usize = 12;
    pub const LEFT_ELBOW: usize = 13;
    pub const RIGHT_ELBOW: usize = 14;
    pub const LEFT_WRIST: usize = 15;
    pub const RIGHT_WRIST: usize = 16;
    pub const LEFT_HIP: usize = 23;
    pub const RIGHT_HIP: usize = 24;
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LandmarkPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub visibility: f64,
}

impl LandmarkPoint {
    pub fn new(x: f64, y: f64, z: f64, visibility: f64) -> Self {
        Self { x, y, z, visibility }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_well_formed(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.z.is_finite()
            && (0.0..=1.0).contains(&self.visibility)
    }
}

/// Camera position on the robot housing. The derived ordering
/// (front < left < right) fixes the summation order during fusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CameraId {
    Front,
    Left,
    Right,
}

impl CameraId {
    pub const ALL: [CameraId; 3] = [CameraId::Front, CameraId::Left, CameraId::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            CameraId::Front => "front",
            CameraId::Left => "left",
            CameraId::Right => "right",
        }
    }
}

impl fmt::Display for CameraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CameraId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "front" => Ok(CameraId::Front),
            "left" => Ok(CameraId::Left),
            "right" => Ok(CameraId::Right),
            other => Err(Error::invalid(format!("unknown camera id {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraFrame {
    pub camera: CameraId,
    pub timestamp_ms: f64,
    pub landmarks: [LandmarkPoint; NUM_LANDMARKS],
    /// Pixel diameter of the user's iris; only the front camera reports it.
    pub iris_diameter_px: Option<f64>,
}

impl CameraFrame {
    pub fn new(camera: CameraId, timestamp_ms: f64, landmarks: [LandmarkPoint; NUM_LANDMARKS]) -> Self {
        Self { camera, timestamp_ms, landmarks, iris_diameter_px: None }
    }
}

/// Splits a mixed-camera frame list into per-camera tracks, ordered by
/// camera id. Frame order within each track is preserved.
pub fn split_by_camera(frames: Vec<CameraFrame>) -> Vec<(CameraId, Vec<CameraFrame>)> {
    let mut tracks: Vec<(CameraId, Vec<CameraFrame>)> = Vec::new();
    for frame in frames {
        match tracks.iter_mut().find(|(c, _)| *c == frame.camera) {
            Some((_, t)) => t.push(frame),
            None => tracks.push((frame.camera, vec![frame])),
        }
    }
    tracks.sort_by_key(|(c, _)| *c);
    tracks
}
