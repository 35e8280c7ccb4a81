//! One session from raw streams to preprocessed channels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{fuse_poses, resample_to_30fps, rotate_camera_frame, split_by_camera, CalibrationSet, CameraId, FusionConfig, LandmarkStream};
use crate::metrics::{assemble_channels, ChannelSet, FaceStream};
use crate::preprocess::{preprocess, PhaseMarkers, PreprocessConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub fusion: FusionConfig,
    pub preprocess: PreprocessConfig,
}

/// Rotate each camera track with its calibration, resample to 30 Hz, fuse,
/// compute the 23 channels, trim to the markers (when given), interpolate
/// and smooth. Every camera in the stream needs a calibration entry.
pub fn extract_session(
    landmarks: LandmarkStream,
    faces: &FaceStream,
    calibration: &CalibrationSet,
    markers: Option<PhaseMarkers>,
    cfg: &ExtractConfig,
) -> Result<ChannelSet> {
    let session = landmarks.session_id.clone().ok_or_else(|| Error::invalid("landmark stream is empty"))?;
    if let Some(fs) = &faces.session_id {
        if *fs != session {
            return Err(Error::Schema(format!("face stream belongs to {fs}, landmarks to {session}")));
        }
    }
    let mut tracks = Vec::new();
    for (camera, frames) in split_by_camera(landmarks.frames) {
        let cal = calibration
            .get(camera)
            .ok_or_else(|| Error::Calibration { camera: camera.to_string(), msg: "no calibration entry".into() })?;
        tracks.push(resample_to_30fps(&rotate_camera_frame(&frames, cal)?)?);
    }
    let fused = fuse_poses(&tracks, &cfg.fusion)?;
    let focal = calibration.get(CameraId::Front).and_then(|c| c.focal_px);
    let raw = assemble_channels(&session, &fused, &faces.frames, focal)?;
    preprocess(&raw, markers, &cfg.preprocess)
}
