//! Per-frame geometry. Sign conventions (common body frame, `y` down, `z`
//! towards the robot, `x` towards the user's left):
//!
//! * heading: positive when the user turns to their left;
//! * pitch: positive when looking down / leaning forward;
//! * tilt: positive when the user's left side is higher.

use crate::ingest::{idx, FusedPose, FPS};

/// Physical iris diameter used by the pinhole distance estimate.
pub const IRIS_MM: f64 = 11.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub heading: f64,
    pub pitch: f64,
    pub tilt: f64,
}

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn mid(a: V3, b: V3) -> V3 {
    [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

fn horizontal_len(v: V3) -> f64 {
    v[0].hypot(v[2])
}

/// Maps an angle in degrees into `(-180, 180]`.
fn wrap_deg(a: f64) -> f64 {
    let mut a = a % 360.0;
    if a > 180.0 {
        a -= 360.0;
    } else if a <= -180.0 {
        a += 360.0;
    }
    a
}

fn deg_atan2(y: f64, x: f64) -> f64 {
    wrap_deg(y.atan2(x).to_degrees())
}

/// Angle of a left-minus-right vector against the horizontal plane.
fn line_tilt(left_minus_right: V3) -> f64 {
    deg_atan2(-left_minus_right[1], horizontal_len(left_minus_right))
}

pub fn head_orientation(pose: &FusedPose) -> Option<Orientation> {
    let nose = pose.point(idx::NOSE)?;
    let le = pose.point(idx::LEFT_EAR)?;
    let re = pose.point(idx::RIGHT_EAR)?;
    let f = sub(nose, mid(le, re));
    Some(Orientation {
        heading: deg_atan2(f[0], f[2]),
        pitch: deg_atan2(f[1], horizontal_len(f)),
        tilt: line_tilt(sub(le, re)),
    })
}

pub fn trunk_orientation(pose: &FusedPose) -> Option<Orientation> {
    let ls = pose.point(idx::LEFT_SHOULDER)?;
    let rs = pose.point(idx::RIGHT_SHOULDER)?;
    let lh = pose.point(idx::LEFT_HIP)?;
    let rh = pose.point(idx::RIGHT_HIP)?;
    let s = sub(ls, rs);
    // Horizontal normal of the shoulder line, pointing forward.
    let (nx, nz) = (-s[2], s[0]);
    let heading = deg_atan2(nx, nz);
    let nlen = nx.hypot(nz);
    let axis = sub(mid(ls, rs), mid(lh, rh));
    let forward = if nlen > 0.0 { (axis[0] * nx + axis[2] * nz) / nlen } else { axis[2] };
    Some(Orientation { heading, pitch: deg_atan2(forward, -axis[1]), tilt: line_tilt(s) })
}

/// Axis-aligned extent (width, height, depth) of the valid landmarks.
pub fn body_dimensions(pose: &FusedPose) -> Option<[f64; 3]> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut count = 0;
    for (p, _) in pose.points.iter().zip(&pose.valid).filter(|(_, v)| **v) {
        for d in 0..3 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
        count += 1;
    }
    (count >= 2).then(|| [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]])
}

fn centroid(pose: &FusedPose) -> Option<V3> {
    let mut acc = [0.0; 3];
    let mut n = 0usize;
    for (p, _) in pose.points.iter().zip(&pose.valid).filter(|(_, v)| **v) {
        for d in 0..3 {
            acc[d] += p[d];
        }
        n += 1;
    }
    (n > 0).then(|| [acc[0] / n as f64, acc[1] / n as f64, acc[2] / n as f64])
}

/// Velocity of the valid-landmark centroid in units/s along x, y and z.
/// Central differences in the interior, one-sided at the ends; a frame is
/// missing when any centroid it needs is missing.
pub fn body_velocity(poses: &[FusedPose]) -> [Vec<Option<f64>>; 3] {
    let c: Vec<Option<V3>> = poses.iter().map(centroid).collect();
    let n = c.len();
    let mut out: [Vec<Option<f64>>; 3] = [vec![None; n], vec![None; n], vec![None; n]];
    if n < 2 {
        return out;
    }
    for t in 0..n {
        let (a, b, scale) = if t == 0 {
            (c[0], c[1], FPS)
        } else if t == n - 1 {
            (c[n - 2], c[n - 1], FPS)
        } else {
            (c[t - 1], c[t + 1], FPS / 2.0)
        };
        if let (Some(a), Some(b), Some(_)) = (a, b, c[t]) {
            for d in 0..3 {
                out[d][t] = Some((b[d] - a[d]) * scale);
            }
        }
    }
    out
}

/// Nose position relative to the shoulder midpoint: (vertical, sagittal).
pub fn head_position(pose: &FusedPose) -> Option<(f64, f64)> {
    let nose = pose.point(idx::NOSE)?;
    let ms = mid(pose.point(idx::LEFT_SHOULDER)?, pose.point(idx::RIGHT_SHOULDER)?);
    Some((nose[1] - ms[1], nose[2] - ms[2]))
}

fn angle_between(a: V3, b: V3) -> Option<f64> {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    Some(norm(cross).atan2(dot(a, b)).to_degrees())
}

/// Mean over the available sides of the angle between the downward trunk
/// axis and the shoulder→elbow vector.
pub fn arm_opening(pose: &FusedPose) -> Option<f64> {
    let ls = pose.point(idx::LEFT_SHOULDER)?;
    let rs = pose.point(idx::RIGHT_SHOULDER)?;
    let trunk = sub(mid(pose.point(idx::LEFT_HIP)?, pose.point(idx::RIGHT_HIP)?), mid(ls, rs));
    let sides = [(ls, idx::LEFT_ELBOW), (rs, idx::RIGHT_ELBOW)];
    let angles: Vec<f64> = sides
        .iter()
        .filter_map(|(shoulder, elbow)| pose.point(*elbow).and_then(|e| angle_between(trunk, sub(e, *shoulder))))
        .collect();
    (!angles.is_empty()).then(|| angles.iter().sum::<f64>() / angles.len() as f64)
}

/// Pinhole distance to the front camera in millimetres.
pub fn estimate_distance(iris_diameter_px: f64, focal_px: f64) -> Option<f64> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    (ok(iris_diameter_px) && ok(focal_px)).then(|| focal_px * IRIS_MM / iris_diameter_px)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ingest::{mat_vec, yaw_matrix};
    use crate::ingest::NUM_LANDMARKS;
    use proptest::prelude::*;

    /// Upright user facing the robot: ears level, nose ahead of the ear
    /// midpoint, square shoulders and hips, arms hanging.
    pub fn canonical_pose() -> FusedPose {
        let mut pose = FusedPose::invalid();
        let mut set = |i: usize, p: V3| {
            pose.points[i] = p;
            pose.valid[i] = true;
            pose.visibility[i] = 1.0;
        };
        set(idx::NOSE, [0.0, -0.50, 0.10]);
        set(idx::LEFT_EAR, [0.07, -0.50, 0.0]);
        set(idx::RIGHT_EAR, [-0.07, -0.50, 0.0]);
        set(idx::LEFT_SHOULDER, [0.18, -0.30, 0.0]);
        set(idx::RIGHT_SHOULDER, [-0.18, -0.30, 0.0]);
        set(idx::LEFT_ELBOW, [0.18, 0.0, 0.0]);
        set(idx::RIGHT_ELBOW, [-0.18, 0.0, 0.0]);
        set(idx::LEFT_WRIST, [0.18, 0.25, 0.05]);
        set(idx::RIGHT_WRIST, [-0.18, 0.25, 0.05]);
        set(idx::LEFT_HIP, [0.12, 0.30, 0.0]);
        set(idx::RIGHT_HIP, [-0.12, 0.30, 0.0]);
        pose
    }

    fn transform(pose: &FusedPose, f: impl Fn(V3) -> V3) -> FusedPose {
        let mut out = pose.clone();
        for (p, v) in out.points.iter_mut().zip(&pose.valid) {
            if *v {
                *p = f(*p);
            }
        }
        out
    }

    fn roll(deg: f64) -> impl Fn(V3) -> V3 {
        // Rotation in the x/y plane raising +x (the user's left) when deg > 0.
        let (s, c) = deg.to_radians().sin_cos();
        move |p: V3| [c * p[0] + s * p[1], -s * p[0] + c * p[1], p[2]]
    }

    #[test]
    fn canonical_pose_is_zero_orientation() {
        let p = canonical_pose();
        let h = head_orientation(&p).unwrap();
        let t = trunk_orientation(&p).unwrap();
        for v in [h.heading, h.pitch, h.tilt, t.heading, t.pitch, t.tilt] {
            assert!(v.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn yaw_of_25_degrees_is_heading_25() {
        let r = yaw_matrix(25.0);
        let p = transform(&canonical_pose(), |v| mat_vec(&r, v));
        let h = head_orientation(&p).unwrap();
        assert!((h.heading - 25.0).abs() < 1e-6);
        assert!(h.pitch.abs() < 1e-9 && h.tilt.abs() < 1e-9);
        assert!((trunk_orientation(&p).unwrap().heading - 25.0).abs() < 1e-6);
    }

    #[test]
    fn rolled_head_has_tilt() {
        let p = transform(&canonical_pose(), roll(10.0));
        assert!((head_orientation(&p).unwrap().tilt - 10.0).abs() < 1e-6);
    }

    #[test]
    fn looking_down_is_positive_pitch() {
        let mut p = canonical_pose();
        p.points[idx::NOSE][1] += 0.05;
        assert!(head_orientation(&p).unwrap().pitch > 0.0);
    }

    #[test]
    fn forward_lean_of_15_degrees() {
        let mut p = canonical_pose();
        let trunk_len = 0.60;
        let dz = 15f64.to_radians().tan() * trunk_len;
        p.points[idx::LEFT_SHOULDER][2] += dz;
        p.points[idx::RIGHT_SHOULDER][2] += dz;
        assert!((trunk_orientation(&p).unwrap().pitch - 15.0).abs() < 1e-6);
    }

    #[test]
    fn lowered_shoulder_tilts_trunk() {
        let half = 0.18;
        let drop = 2.0 * half * 5f64.to_radians().tan();
        let mut p = canonical_pose();
        p.points[idx::RIGHT_SHOULDER][1] += drop;
        assert!((trunk_orientation(&p).unwrap().tilt - 5.0).abs() < 1e-6);
        let mut q = canonical_pose();
        q.points[idx::LEFT_SHOULDER][1] += drop;
        assert!((trunk_orientation(&q).unwrap().tilt + 5.0).abs() < 1e-6);
    }

    #[test]
    fn missing_landmarks_give_none() {
        let mut p = canonical_pose();
        p.valid[idx::LEFT_EAR] = false;
        assert!(head_orientation(&p).is_none());
        p.valid[idx::RIGHT_HIP] = false;
        assert!(trunk_orientation(&p).is_none());
        let mut q = canonical_pose();
        q.valid[idx::RIGHT_SHOULDER] = false;
        assert!(head_position(&q).is_none());
    }

    #[test]
    fn dimensions_of_degenerate_and_two_point_poses() {
        let mut p = FusedPose::invalid();
        for i in 0..NUM_LANDMARKS {
            p.points[i] = [0.3, 0.4, 0.1];
            p.valid[i] = true;
        }
        assert_eq!(body_dimensions(&p), Some([0.0, 0.0, 0.0]));
        let mut q = FusedPose::invalid();
        q.points[0] = [0.2, 0.5, 0.1];
        q.points[1] = [0.7, 0.5, 0.1];
        q.valid[0] = true;
        assert!(body_dimensions(&q).is_none());
        q.valid[1] = true;
        let d = body_dimensions(&q).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15 && d[1] == 0.0 && d[2] == 0.0);
    }

    #[test]
    fn head_position_under_y_down() {
        let mut p = canonical_pose();
        p.points[idx::NOSE] = [0.0, -0.30, 0.0];
        assert_eq!(head_position(&p), Some((0.0, 0.0)));
        p.points[idx::NOSE] = [0.0, -0.40, 0.05];
        let (v, s) = head_position(&p).unwrap();
        assert!((v + 0.1).abs() < 1e-12 && (s - 0.05).abs() < 1e-12);
    }

    #[test]
    fn arm_opening_cases() {
        let p = canonical_pose();
        assert!(arm_opening(&p).unwrap().abs() < 1e-9);
        let mut q = canonical_pose();
        q.points[idx::LEFT_ELBOW] = [0.48, -0.30, 0.0];
        q.points[idx::RIGHT_ELBOW] = [-0.48, -0.30, 0.0];
        assert!((arm_opening(&q).unwrap() - 90.0).abs() < 1e-6);
        q.valid[idx::RIGHT_ELBOW] = false;
        q.points[idx::LEFT_ELBOW] = [0.18 + 0.3 * 0.5, -0.30 + 0.3 * 0.75f64.sqrt(), 0.0];
        assert!((arm_opening(&q).unwrap() - 30.0).abs() < 1e-6);
    }

    #[test]
    fn distance_from_iris() {
        assert!((estimate_distance(30.0, 600.0).unwrap() - 234.0).abs() < 1e-12);
        let a = estimate_distance(20.0, 650.0).unwrap();
        let b = estimate_distance(40.0, 650.0).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-12);
        assert!(estimate_distance(0.0, 600.0).is_none());
        assert!(estimate_distance(10.0, -1.0).is_none());
    }

    #[test]
    fn velocity_of_static_and_linear_motion() {
        let p = canonical_pose();
        let still: Vec<FusedPose> = vec![p.clone(); 6];
        for axis in body_velocity(&still) {
            assert!(axis.iter().all(|v| v.unwrap().abs() < 1e-12));
        }
        let moving: Vec<FusedPose> = (0..8).map(|k| transform(&p, |v| [v[0] + 0.01 * k as f64, v[1], v[2]])).collect();
        let [vx, vy, _] = body_velocity(&moving);
        for v in vx {
            assert!((v.unwrap() - 0.3).abs() < 1e-9);
        }
        assert!(vy.iter().all(|v| v.unwrap().abs() < 1e-12));
    }

    #[test]
    fn velocity_matches_finite_difference_oracle() {
        let p = canonical_pose();
        let xs: Vec<f64> = (0..120).map(|k| 0.05 * (k as f64 * 0.21).sin()).collect();
        let poses: Vec<FusedPose> = xs.iter().map(|&dx| transform(&p, move |v| [v[0], v[1] + dx, v[2]])).collect();
        let cy: Vec<f64> = poses.iter().map(|q| centroid(q).unwrap()[1]).collect();
        let want = socialsig_oracles::series_derivative(&cy, FPS);
        let got = &body_velocity(&poses)[1];
        for (g, w) in got.iter().zip(&want) {
            assert!((g.unwrap() - w).abs() < 1e-9);
        }
    }

    #[test]
    fn velocity_missing_next_to_gaps() {
        let p = canonical_pose();
        let mut poses = vec![p.clone(); 5];
        poses[2] = FusedPose::invalid();
        let vx = &body_velocity(&poses)[0];
        assert!(vx[0].is_some() && vx[4].is_some());
        assert!(vx[1].is_none() && vx[2].is_none() && vx[3].is_none());
    }

    #[test]
    fn dimensions_match_brute_force_scan() {
        let mut p = FusedPose::invalid();
        for i in 0..NUM_LANDMARKS {
            let t = i as f64;
            p.points[i] = [(t * 1.3).sin(), (t * 0.7).cos() * 0.4, (t * 2.1).sin() * 0.2];
            p.valid[i] = true;
        }
        let want = socialsig_oracles::brute_extent(&p.points);
        assert_eq!(body_dimensions(&p).unwrap(), want);
    }

    proptest! {
        #[test]
        fn yaw_equivariance(theta in -170.0f64..170.0) {
            let base = canonical_pose();
            let r = yaw_matrix(theta);
            let rotated = transform(&base, |v| mat_vec(&r, v));
            for (o0, o1) in [
                (head_orientation(&base).unwrap(), head_orientation(&rotated).unwrap()),
                (trunk_orientation(&base).unwrap(), trunk_orientation(&rotated).unwrap()),
            ] {
                let dh = wrap_deg(o1.heading - o0.heading - theta);
                prop_assert!(dh.abs() < 1e-6);
                prop_assert!((o1.pitch - o0.pitch).abs() < 1e-6);
                prop_assert!((o1.tilt - o0.tilt).abs() < 1e-6);
            }
        }

        #[test]
        fn translation_invariance(dx in -1.0f64..1.0, dy in -1.0f64..1.0, dz in -1.0f64..1.0, lean in -20.0f64..20.0) {
            let base = transform(&canonical_pose(), roll(lean / 3.0));
            let moved = transform(&base, |v| [v[0] + dx, v[1] + dy, v[2] + dz]);
            let (a, b) = (head_orientation(&base).unwrap(), head_orientation(&moved).unwrap());
            prop_assert!((a.heading - b.heading).abs() < 1e-9 && (a.pitch - b.pitch).abs() < 1e-9 && (a.tilt - b.tilt).abs() < 1e-9);
            let (a, b) = (trunk_orientation(&base).unwrap(), trunk_orientation(&moved).unwrap());
            prop_assert!((a.heading - b.heading).abs() < 1e-9 && (a.pitch - b.pitch).abs() < 1e-9 && (a.tilt - b.tilt).abs() < 1e-9);
            let (da, db) = (body_dimensions(&base).unwrap(), body_dimensions(&moved).unwrap());
            for d in 0..3 { prop_assert!((da[d] - db[d]).abs() < 1e-9); }
            let (ha, hb) = (head_position(&base).unwrap(), head_position(&moved).unwrap());
            prop_assert!((ha.0 - hb.0).abs() < 1e-9 && (ha.1 - hb.1).abs() < 1e-9);
            prop_assert!((arm_opening(&base).unwrap() - arm_opening(&moved).unwrap()).abs() < 1e-9);
        }
    }
}
