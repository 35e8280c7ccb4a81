use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CameraFrame, CameraId, LandmarkPoint};
use crate::error::{Error, Result};

const ORTHO_TOL: f64 = 1e-9;

pub type Matrix3 = [[f64; 3]; 3];

pub const IDENTITY: Matrix3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Rotation taking camera coordinates into the common body frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraCalibration {
    pub camera: CameraId,
    pub rotation: Matrix3,
    /// Focal length in pixels; needed for the front camera's distance estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focal_px: Option<f64>,
}

impl CameraCalibration {
    pub fn identity(camera: CameraId) -> Self {
        Self { camera, rotation: IDENTITY, focal_px: None }
    }

    /// Rotation by `degrees` about the vertical (`y`) axis, in the sense that
    /// increases heading.
    pub fn about_vertical(camera: CameraId, degrees: f64) -> Self {
        Self { camera, rotation: yaw_matrix(degrees), focal_px: None }
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.rotation;
        if r.iter().flatten().any(|v| !v.is_finite()) {
            return Err(self.err("non-finite entry"));
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > ORTHO_TOL {
                    return Err(self.err("rotation is not orthonormal"));
                }
            }
        }
        if (det3(r) - 1.0).abs() > ORTHO_TOL {
            return Err(self.err("rotation determinant is not +1"));
        }
        if let Some(f) = self.focal_px {
            if !(f.is_finite() && f > 0.0) {
                return Err(self.err("focal length must be positive"));
            }
        }
        Ok(())
    }

    fn err(&self, msg: &str) -> Error {
        Error::Calibration { camera: self.camera.to_string(), msg: msg.to_string() }
    }
}

pub fn yaw_matrix(degrees: f64) -> Matrix3 {
    let (s, c) = degrees.to_radians().sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn mat_mul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_vec(r: &Matrix3, v: [f64; 3]) -> [f64; 3] {
    [
        r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
        r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
        r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
    ]
}

fn det3(r: &Matrix3) -> f64 {
    r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
}

/// Applies the calibration rotation to every landmark; visibility is kept.
pub fn rotate_camera_frame(frames: &[CameraFrame], calibration: &CameraCalibration) -> Result<Vec<CameraFrame>> {
    calibration.validate()?;
    frames
        .iter()
        .map(|f| {
            if f.camera != calibration.camera {
                return Err(Error::Calibration {
                    camera: calibration.camera.to_string(),
                    msg: format!("applied to a frame from camera {}", f.camera),
                });
            }
            let mut out = f.clone();
            for p in out.landmarks.iter_mut() {
                let [x, y, z] = mat_vec(&calibration.rotation, p.coords());
                *p = LandmarkPoint::new(x, y, z, p.visibility);
            }
            Ok(out)
        })
        .collect()
}

/// Calibration file: one entry per camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSet {
    pub cameras: Vec<CameraCalibration>,
}

impl CalibrationSet {
    pub fn get(&self, camera: CameraId) -> Option<&CameraCalibration> {
        self.cameras.iter().find(|c| c.camera == camera)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.cameras.iter().enumerate() {
            c.validate()?;
            if self.cameras[..i].iter().any(|o| o.camera == c.camera) {
                return Err(c.err("listed twice"));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let set: CalibrationSet = serde_json::from_str(&text)?;
        set.validate()?;
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::NUM_LANDMARKS;

    fn sample_frame(camera: CameraId) -> CameraFrame {
        let mut lm = [LandmarkPoint::default(); NUM_LANDMARKS];
        for (i, p) in lm.iter_mut().enumerate() {
            let t = i as f64;
            *p = LandmarkPoint::new((t * 0.7).sin(), (t * 0.3).cos(), 0.05 * t, 0.5 + 0.01 * t);
        }
        CameraFrame::new(camera, 0.0, lm)
    }

    fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    #[test]
    fn identity_leaves_frames_unchanged() {
        let f = vec![sample_frame(CameraId::Front)];
        let out = rotate_camera_frame(&f, &CameraCalibration::identity(CameraId::Front)).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn two_quarter_turns_equal_a_half_turn() {
        let f = vec![sample_frame(CameraId::Left)];
        let q = CameraCalibration::about_vertical(CameraId::Left, 90.0);
        let h = CameraCalibration::about_vertical(CameraId::Left, 180.0);
        let twice = rotate_camera_frame(&rotate_camera_frame(&f, &q).unwrap(), &q).unwrap();
        let once = rotate_camera_frame(&f, &h).unwrap();
        for (a, b) in twice[0].landmarks.iter().zip(&once[0].landmarks) {
            assert!(dist(a.coords(), b.coords()) < 1e-12);
            assert_eq!(a.visibility, b.visibility);
        }
    }

    #[test]
    fn rotation_preserves_pairwise_distances() {
        let f = vec![sample_frame(CameraId::Right)];
        let r = mat_mul(&yaw_matrix(37.0), &[[1.0, 0.0, 0.0], [0.0, 0.8, -0.6], [0.0, 0.6, 0.8]]);
        let cal = CameraCalibration { camera: CameraId::Right, rotation: r, focal_px: None };
        let out = rotate_camera_frame(&f, &cal).unwrap();
        for i in 0..NUM_LANDMARKS {
            for j in 0..NUM_LANDMARKS {
                let before = dist(f[0].landmarks[i].coords(), f[0].landmarks[j].coords());
                let after = dist(out[0].landmarks[i].coords(), out[0].landmarks[j].coords());
                assert!((before - after).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_matrices_and_wrong_camera() {
        let f = vec![sample_frame(CameraId::Front)];
        let skew = CameraCalibration { camera: CameraId::Front, rotation: [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], focal_px: None };
        assert!(rotate_camera_frame(&f, &skew).is_err());
        let mirror = CameraCalibration { camera: CameraId::Front, rotation: [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], focal_px: None };
        assert!(rotate_camera_frame(&f, &mirror).is_err());
        assert!(rotate_camera_frame(&f, &CameraCalibration::identity(CameraId::Left)).is_err());
    }

    #[test]
    fn calibration_file_round_trips() {
        let set = CalibrationSet {
            cameras: vec![
                CameraCalibration { camera: CameraId::Front, rotation: IDENTITY, focal_px: Some(600.0) },
                CameraCalibration::about_vertical(CameraId::Left, 30.0),
            ],
        };
        let back: CalibrationSet = serde_json::from_str(&set.to_json()).unwrap();
        assert_eq!(back, set);
        back.validate().unwrap();
    }
}
