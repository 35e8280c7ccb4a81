//! Seeded synthetic corpora with a controllable class signal.
//!
//! Every session is generated from its own ChaCha8 stream (stream number =
//! session index + 1, stream 0 assigns classes), so output does not depend
//! on generation order. All random draws happen in the same order whatever
//! the separability, so two corpora with the same seed and different `δ`
//! differ only in the patterned quantities:
//!
//! * head heading: an extra slow oscillation of `δ·18°` amplitude;
//! * distance: a drift of `δ·500 mm` away from the robot over the session;
//! * fear: baseline raised by `δ·0.12` and bursts of height `δ·0.35`.
//!
//! These are modelling choices that make the pipeline testable, not claims
//! about real users. Values are quantised to the precision of the text
//! formats, so parsing written files reproduces the in-memory streams
//! exactly.

use std::f64::consts::PI;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{write_questionnaire, QuestionnaireResponse};
use crate::ingest::{idx, mat_vec, write_landmark_stream, yaw_matrix, CalibrationSet, CameraCalibration, CameraFrame, CameraId, LandmarkPoint, LandmarkStream, FPS, NUM_LANDMARKS};
use crate::metrics::{write_face_stream, ChannelSet, FaceFrame, FaceStream, IRIS_MM};
use crate::pipeline::{extract_session, ExtractConfig};
use crate::preprocess::{format_markers, PhaseMarkers};

pub const FOCAL_PX: f64 = 600.0;
/// Yaw of the side cameras relative to the front camera, degrees.
pub const SIDE_CAMERA_YAW: f64 = 35.0;
const MAX_REJECTIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub sessions: usize,
    /// Share of sessions generated as low satisfaction.
    pub low_fraction: f64,
    pub duration_mean_s: f64,
    pub duration_sd_s: f64,
    pub duration_min_s: f64,
    pub duration_max_s: f64,
    /// Class signal strength in `[0, 1]`.
    pub separability: f64,
    pub seed: u64,
    /// 1 = front only, 2 = front and left, 3 = all three.
    pub cameras: usize,
    /// Recording before and after the main phase, seconds.
    pub lead_s: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            sessions: 46,
            low_fraction: 15.0 / 46.0,
            duration_mean_s: 132.0,
            duration_sd_s: 61.0,
            duration_min_s: 35.0,
            duration_max_s: 335.0,
            separability: 1.0,
            seed: 0,
            cameras: 1,
            lead_s: 2.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(format!("synthetic config: {m}")));
        if self.sessions < 2 {
            return bad("need at least 2 sessions");
        }
        if !(self.low_fraction > 0.0 && self.low_fraction < 1.0) {
            return bad("low_fraction must lie strictly between 0 and 1");
        }
        if !(0.0..=1.0).contains(&self.separability) {
            return bad("separability must lie in [0, 1]");
        }
        if !(self.duration_min_s > 0.0 && self.duration_min_s <= self.duration_max_s) {
            return bad("duration bounds need 0 < min <= max");
        }
        if !(self.duration_sd_s >= 0.0 && self.duration_mean_s.is_finite()) {
            return bad("duration mean must be finite and sd non-negative");
        }
        if self.duration_sd_s == 0.0 && !(self.duration_min_s..=self.duration_max_s).contains(&self.duration_mean_s) {
            return bad("fixed duration lies outside the bounds");
        }
        if !(1..=3).contains(&self.cameras) {
            return bad("cameras must be 1, 2 or 3");
        }
        if !(self.lead_s >= 0.5 && self.lead_s.is_finite()) {
            return bad("lead_s must be at least 0.5");
        }
        Ok(())
    }

    pub fn low_count(&self) -> usize {
        ((self.sessions as f64 * self.low_fraction).round() as usize).clamp(1, self.sessions - 1)
    }

    pub fn session_id(&self, i: usize) -> String {
        let w = self.sessions.to_string().len().max(3);
        format!("s{:0w$}", i + 1)
    }

    /// Calibration matching the generated cameras.
    pub fn calibration(&self) -> CalibrationSet {
        let mut cameras = vec![CameraCalibration { focal_px: Some(FOCAL_PX), ..CameraCalibration::identity(CameraId::Front) }];
        if self.cameras >= 2 {
            cameras.push(CameraCalibration::about_vertical(CameraId::Left, SIDE_CAMERA_YAW));
        }
        if self.cameras >= 3 {
            cameras.push(CameraCalibration::about_vertical(CameraId::Right, -SIDE_CAMERA_YAW));
        }
        CalibrationSet { cameras }
    }

    /// Generated class per session (0 = low).
    pub fn classes(&self) -> Vec<u8> {
        let mut rng = stream_rng(self.seed, 0);
        let mut c: Vec<u8> = (0..self.sessions).map(|i| u8::from(i >= self.low_count())).collect();
        c.shuffle(&mut rng);
        c
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn quantize(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (v * s).round() / s
}

#[derive(Debug, Clone)]
pub struct SynthSession {
    pub session_id: String,
    /// Generated class (0 = low); evaluation re-derives labels from items.
    pub class: u8,
    pub duration_s: f64,
    pub frames: Vec<CameraFrame>,
    pub faces: Vec<FaceFrame>,
    pub markers: PhaseMarkers,
    pub response: QuestionnaireResponse,
}

impl SynthSession {
    pub fn landmark_stream(&self) -> LandmarkStream {
        LandmarkStream { session_id: Some(self.session_id.clone()), frames: self.frames.clone() }
    }

    pub fn face_stream(&self) -> FaceStream {
        FaceStream { session_id: Some(self.session_id.clone()), frames: self.faces.clone() }
    }
}

/// Stationary AR(1) process with marginal standard deviation `sd`.
struct Ar1 {
    phi: f64,
    innov: f64,
    x: f64,
}

impl Ar1 {
    fn new(rng: &mut ChaCha8Rng, phi: f64, sd: f64) -> Self {
        let z: f64 = StandardNormal.sample(rng);
        Self { phi, innov: sd * (1.0 - phi * phi).sqrt(), x: sd * z }
    }

    fn series(mut self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let v = self.x;
                let z: f64 = StandardNormal.sample(rng);
                self.x = self.phi * self.x + self.innov * z;
                v
            })
            .collect()
    }
}

fn truncated_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64, lo: f64, hi: f64) -> Result<f64> {
    if sd == 0.0 {
        return Ok(mean);
    }
    let d = Normal::new(mean, sd).map_err(|e| Error::invalid(e.to_string()))?;
    for _ in 0..MAX_REJECTIONS {
        let v = d.sample(rng);
        if (lo..=hi).contains(&v) {
            return Ok(v);
        }
    }
    Err(Error::invalid("duration distribution has negligible mass inside its bounds"))
}

/// Landmark template in the body frame (x to the user's left, y down, z
/// towards the robot), pelvis at the origin.
fn template() -> [[f64; 3]; NUM_LANDMARKS] {
    let mut p = [[0.0; 3]; NUM_LANDMARKS];
    let mut pair = |l: usize, r: usize, v: [f64; 3]| {
        p[l] = v;
        p[r] = [-v[0], v[1], v[2]];
    };
    pair(1, 4, [0.020, -0.83, 0.085]);
    pair(2, 5, [0.035, -0.83, 0.080]);
    pair(3, 6, [0.050, -0.83, 0.070]);
    pair(idx::LEFT_EAR, idx::RIGHT_EAR, [0.070, -0.80, 0.0]);
    pair(9, 10, [0.025, -0.76, 0.085]);
    pair(idx::LEFT_SHOULDER, idx::RIGHT_SHOULDER, [0.18, -0.60, 0.0]);
    pair(idx::LEFT_HIP, idx::RIGHT_HIP, [0.12, 0.0, 0.0]);
    pair(25, 26, [0.12, 0.40, 0.02]);
    pair(27, 28, [0.12, 0.80, 0.0]);
    pair(29, 30, [0.12, 0.83, -0.15]);
    pair(31, 32, [0.12, 0.85, 0.25]);
    p[idx::NOSE] = [0.0, -0.80, 0.10];
    p
}

const HEAD: std::ops::RangeInclusive<usize> = 0..=10;

/// Arm points for an opening angle (degrees from the hanging position).
fn set_arms(p: &mut [[f64; 3]; NUM_LANDMARKS], open_deg: f64) {
    let (s, c) = open_deg.to_radians().sin_cos();
    for (side, sh, el, wr, hand) in [(1.0, idx::LEFT_SHOULDER, idx::LEFT_ELBOW, idx::LEFT_WRIST, [17, 19, 21]), (-1.0, idx::RIGHT_SHOULDER, idx::RIGHT_ELBOW, idx::RIGHT_WRIST, [18, 20, 22])] {
        let o = p[sh];
        p[el] = [o[0] + side * 0.3 * s, o[1] + 0.3 * c, o[2] + 0.02];
        p[wr] = [p[el][0] + side * 0.25 * s, p[el][1] + 0.25 * c, o[2] + 0.06];
        for (k, h) in hand.iter().enumerate() {
            let dz = 0.01 * k as f64;
            p[*h] = [p[wr][0] + side * 0.01, p[wr][1] + 0.06, p[wr][2] + dz];
        }
    }
}

fn rotate_about(points: &mut [[f64; 3]], pivot: [f64; 3], r: &[[f64; 3]; 3]) {
    for q in points.iter_mut() {
        let v = mat_vec(r, [q[0] - pivot[0], q[1] - pivot[1], q[2] - pivot[2]]);
        *q = [v[0] + pivot[0], v[1] + pivot[1], v[2] + pivot[2]];
    }
}

fn pitch_matrix(deg: f64) -> [[f64; 3]; 3] {
    let (s, c) = deg.to_radians().sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]]
}

fn transpose(r: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = r[j][i];
        }
    }
    t
}

/// Draws one session. `class` only selects the questionnaire range and,
/// through `δ`, the size of the patterns.
pub fn generate_session(cfg: &SynthConfig, index: usize, class: u8) -> Result<SynthSession> {
    let mut rng = stream_rng(cfg.seed, index as u64 + 1);
    let duration_s = truncated_normal(&mut rng, cfg.duration_mean_s, cfg.duration_sd_s, cfg.duration_min_s, cfg.duration_max_s)?;
    let main = (duration_s * FPS).round() as usize;
    let lead = (cfg.lead_s * FPS).round() as usize;
    let n = main + 2 * lead;
    let low = f64::from(u8::from(class == 0)) * cfg.separability;
    let dt = 1.0 / FPS;

    // Latent parameters.
    let base_amp = rng.gen_range(3.0..8.0);
    let freq = rng.gen_range(0.05..0.15);
    let phase = rng.gen_range(0.0..2.0 * PI);
    let heading_noise_sd = rng.gen_range(2.0..4.0);
    let d0 = rng.gen_range(900.0..1600.0);
    let fear_base = rng.gen_range(0.02..0.10);
    let happy_base = rng.gen_range(0.10..0.40);
    let arm_base = rng.gen_range(12.0..25.0);
    let burst_rate = 1.0 / 20.0;

    // Latent series on the 30 Hz grid.
    let heading_noise = Ar1::new(&mut rng, 0.97, heading_noise_sd * 3.0).series(&mut rng, n);
    let trunk_heading = Ar1::new(&mut rng, 0.995, 3.0).series(&mut rng, n);
    let nod = Ar1::new(&mut rng, 0.95, 3.0).series(&mut rng, n);
    let sway_x = Ar1::new(&mut rng, 0.995, 0.02).series(&mut rng, n);
    let sway_z = Ar1::new(&mut rng, 0.995, 0.02).series(&mut rng, n);
    let arm = Ar1::new(&mut rng, 0.98, 4.0).series(&mut rng, n);
    let dist_noise = Ar1::new(&mut rng, 0.99, 40.0).series(&mut rng, n);
    let fear_noise = Ar1::new(&mut rng, 0.9, 0.02).series(&mut rng, n);
    let expr_noise: Vec<Vec<f64>> = (0..6).map(|_| Ar1::new(&mut rng, 0.95, 0.04).series(&mut rng, n)).collect();
    let mut burst = vec![0.0; n];
    for k in 0..n {
        if rng.gen::<f64>() < burst_rate * dt {
            for (j, b) in burst.iter_mut().enumerate().skip(k) {
                *b += (-((j - k) as f64) * dt / 2.0).exp();
            }
        }
    }
    let vis_jitter: Vec<f64> = (0..n).map(|_| rng.gen_range(0.85..0.99)).collect();
    let mut hand_dropout = vec![false; n];
    let mut k = 0;
    while k < n {
        if rng.gen::<f64>() < 0.002 {
            let len = rng.gen_range(5..20);
            hand_dropout[k..(k + len).min(n)].iter_mut().for_each(|d| *d = true);
            k += len;
        } else {
            k += 1;
        }
    }
    let ts_jitter: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
    let side_offsets_ms = [rng.gen_range(3.0..15.0), rng.gen_range(3.0..15.0)];
    let cam_noise: Vec<f64> = (0..n * (cfg.cameras - 1) * NUM_LANDMARKS * 3).map(|_| 0.003 * rng.gen_range(-1.0..1.0)).collect();

    let tmpl = template();
    let calib = cfg.calibration();
    let to_camera: Vec<(CameraId, [[f64; 3]; 3])> = calib.cameras.iter().map(|c| (c.camera, transpose(&c.rotation))).collect();
    let mut frames = Vec::with_capacity(n * cfg.cameras);
    let mut faces = Vec::with_capacity(n / 2 + 1);
    let offset = [0.5, 0.1, 0.0];
    for k in 0..n {
        let t = k as f64 * dt;
        let heading = (base_amp + 18.0 * low) * (2.0 * PI * freq * t + phase).sin() + heading_noise[k];
        let mut p = tmpl;
        set_arms(&mut p, arm_base + arm[k]);
        let head_pts: Vec<[f64; 3]> = p[HEAD].to_vec();
        let pivot = {
            let m = head_pts.len() as f64;
            let s = head_pts.iter().fold([0.0; 3], |a, q| [a[0] + q[0], a[1] + q[1], a[2] + q[2]]);
            [s[0] / m, s[1] / m, s[2] / m]
        };
        let mut head = head_pts;
        rotate_about(&mut head, pivot, &pitch_matrix(nod[k]));
        rotate_about(&mut head, pivot, &yaw_matrix(heading - trunk_heading[k]));
        p[HEAD].copy_from_slice(&head);
        rotate_about(&mut p, [0.0; 3], &yaw_matrix(trunk_heading[k]));
        for q in p.iter_mut() {
            *q = [q[0] + offset[0] + sway_x[k], q[1] + offset[1], q[2] + offset[2] + sway_z[k]];
        }

        let distance = d0 + 500.0 * low * (k as f64 / n as f64) + dist_noise[k];
        let iris = quantize(FOCAL_PX * IRIS_MM / distance.max(300.0), 4);
        for (ci, (camera, rt)) in to_camera.iter().enumerate() {
            let ts = if k == 0 { 0.0 } else { k as f64 * 1000.0 / FPS + ts_jitter[k] };
            let ts = if ci == 0 { ts } else { ts + side_offsets_ms[ci - 1] };
            let mut lm = [LandmarkPoint::default(); NUM_LANDMARKS];
            for (j, q) in p.iter().enumerate() {
                let mut v = if ci == 0 { *q } else { mat_vec(rt, *q) };
                if ci > 0 {
                    let base = ((k * (cfg.cameras - 1) + ci - 1) * NUM_LANDMARKS + j) * 3;
                    for d in 0..3 {
                        v[d] += cam_noise[base + d];
                    }
                }
                let hand = (13..=22).contains(&j);
                let vis = if hand && hand_dropout[k] && ci == 0 { 0.2 } else { vis_jitter[k] - 0.05 * ci as f64 };
                lm[j] = LandmarkPoint::new(quantize(v[0], 6), quantize(v[1], 6), quantize(v[2], 6), quantize(vis, 4));
            }
            let mut f = CameraFrame::new(*camera, quantize(ts, 3), lm);
            if *camera == CameraId::Front {
                f.iris_diameter_px = Some(iris);
            }
            frames.push(f);
        }

        if k % 2 == 0 {
            let fear = fear_base + 0.12 * low + 0.35 * low * burst[k].min(1.0) + fear_noise[k];
            let mut scores = [0.0; 7];
            scores[0] = happy_base + expr_noise[0][k];
            for e in 1..6 {
                scores[e] = 0.05 + expr_noise[e][k];
            }
            scores[3] = fear;
            let others: f64 = scores[..6].iter().map(|s| s.clamp(0.0, 1.0)).sum();
            scores[6] = 1.0 - others;
            for s in scores.iter_mut() {
                *s = quantize(s.clamp(0.0, 1.0), 5);
            }
            faces.push(FaceFrame { timestamp_ms: quantize(k as f64 * 1000.0 / FPS, 3), scores });
        }
    }
    // Frames were pushed camera-interleaved; the stream format allows that.

    // Questionnaire, drawn last so that class never shifts signal draws.
    let items = loop {
        let it: [u8; 5] = std::array::from_fn(|_| if class == 0 { rng.gen_range(1..=3) } else { rng.gen_range(3..=5) });
        let sum: u32 = it.iter().map(|&v| u32::from(v)).sum();
        if (class == 0 && sum <= 14) || (class == 1 && sum >= 16) {
            break it;
        }
    };
    let session_id = cfg.session_id(index);
    Ok(SynthSession {
        response: QuestionnaireResponse::new(session_id.clone(), items)?,
        session_id,
        class,
        duration_s,
        frames,
        faces,
        markers: PhaseMarkers::new(lead, lead + main - 1),
    })
}

/// Generates every session and runs it through extraction, keeping only
/// the channels. Returns sessions in id order with their responses.
pub fn synth_channel_sets(cfg: &SynthConfig, extract: &ExtractConfig) -> Result<(Vec<ChannelSet>, Vec<QuestionnaireResponse>)> {
    cfg.validate()?;
    let classes = cfg.classes();
    let calib = cfg.calibration();
    let out = (0..cfg.sessions)
        .into_par_iter()
        .map(|i| {
            let s = generate_session(cfg, i, classes[i])?;
            let set = extract_session(s.landmark_stream(), &s.face_stream(), &calib, Some(s.markers), extract)?;
            Ok((set, s.response))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().unzip())
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Writes a corpus:
///
/// ```text
/// <dir>/landmarks/<id>.csv   landmark streams
/// <dir>/faces/<id>.csv       expression streams
/// <dir>/questionnaire.csv
/// <dir>/markers.csv
/// <dir>/calibration.json
/// <dir>/synth_config.json
/// <dir>/sessions.csv         session_id,generated_class,duration_s
/// ```
pub fn write_corpus(cfg: &SynthConfig, dir: &Path) -> Result<()> {
    cfg.validate()?;
    let classes = cfg.classes();
    for sub in ["landmarks", "faces"] {
        let p = dir.join(sub);
        fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
    }
    let meta = (0..cfg.sessions)
        .into_par_iter()
        .map(|i| {
            let s = generate_session(cfg, i, classes[i])?;
            write_file(&dir.join("landmarks").join(format!("{}.csv", s.session_id)), |w| write_landmark_stream(w, &s.session_id, &s.frames))?;
            write_file(&dir.join("faces").join(format!("{}.csv", s.session_id)), |w| write_face_stream(w, &s.session_id, &s.faces))?;
            Ok((s.session_id, s.class, s.duration_s, s.markers, s.response))
        })
        .collect::<Result<Vec<_>>>()?;
    let responses: Vec<QuestionnaireResponse> = meta.iter().map(|m| m.4.clone()).collect();
    write_file(&dir.join("questionnaire.csv"), |w| write_questionnaire(w, &responses))?;
    let markers = format_markers(meta.iter().map(|m| (m.0.as_str(), m.3)));
    write_file(&dir.join("markers.csv"), |w| w.write_all(markers.as_bytes()))?;
    write_file(&dir.join("calibration.json"), |w| writeln!(w, "{}", cfg.calibration().to_json()))?;
    write_file(&dir.join("synth_config.json"), |w| writeln!(w, "{}", serde_json::to_string_pretty(cfg).expect("config serializes")))?;
    write_file(&dir.join("sessions.csv"), |w| {
        writeln!(w, "session_id,generated_class,duration_s")?;
        for m in &meta {
            writeln!(w, "{},{},{:.3}", m.0, m.1, m.2)?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_landmark_stream;
    use crate::metrics::{parse_face_stream, Channel};

    fn short(delta: f64, seed: u64) -> SynthConfig {
        SynthConfig { sessions: 6, duration_mean_s: 12.0, duration_sd_s: 3.0, duration_min_s: 8.0, duration_max_s: 16.0, separability: delta, seed, ..Default::default() }
    }

    #[test]
    fn default_split_and_ids() {
        let c = SynthConfig::default();
        assert_eq!(c.low_count(), 15);
        let classes = c.classes();
        assert_eq!(classes.iter().filter(|&&k| k == 0).count(), 15);
        assert_eq!(c.session_id(0), "s001");
        assert_eq!(classes, c.classes());
    }

    #[test]
    fn infeasible_configs_rejected() {
        assert!(SynthConfig { duration_min_s: 50.0, duration_max_s: 40.0, ..Default::default() }.validate().is_err());
        assert!(SynthConfig { separability: 1.5, ..Default::default() }.validate().is_err());
        assert!(SynthConfig { cameras: 4, ..Default::default() }.validate().is_err());
        let far = SynthConfig { duration_mean_s: 10_000.0, duration_sd_s: 1.0, ..short(1.0, 0) };
        assert!(generate_session(&far, 0, 1).is_err());
    }

    #[test]
    fn durations_respect_bounds_and_markers_fit() {
        let c = short(1.0, 3);
        for i in 0..6 {
            let s = generate_session(&c, i, (i % 2) as u8).unwrap();
            assert!((8.0..=16.0).contains(&s.duration_s));
            assert!(s.markers.end < s.frames.len());
        }
    }

    #[test]
    fn written_streams_parse_back_identically() {
        let c = SynthConfig { cameras: 3, ..short(0.5, 1) };
        let s = generate_session(&c, 2, 0).unwrap();
        let mut buf = Vec::new();
        write_landmark_stream(&mut buf, &s.session_id, &s.frames).unwrap();
        let parsed = parse_landmark_stream(buf.as_slice()).unwrap();
        assert_eq!(parsed.frames, s.frames);
        let mut buf = Vec::new();
        write_face_stream(&mut buf, &s.session_id, &s.faces).unwrap();
        assert_eq!(parse_face_stream(buf.as_slice()).unwrap().frames, s.faces);
    }

    #[test]
    fn items_match_class() {
        let c = short(1.0, 2);
        for i in 0..6 {
            assert!(generate_session(&c, i, 0).unwrap().response.score() <= 2.8);
            assert!(generate_session(&c, i, 1).unwrap().response.score() >= 3.2);
        }
    }

    #[test]
    fn separability_changes_only_patterned_channels() {
        let ex = ExtractConfig::default();
        let (a, _) = synth_channel_sets(&short(0.0, 9), &ex).unwrap();
        let (b, _) = synth_channel_sets(&short(1.0, 9), &ex).unwrap();
        let classes = short(0.0, 9).classes();
        let patterned = [Channel::HeadHeading, Channel::HeadSagittal, Channel::Distance, Channel::FaceFear, Channel::FaceNeutral];
        for (i, (x, y)) in a.iter().zip(&b).enumerate() {
            for c in Channel::ALL {
                let d = x.channel(c).values.iter().zip(&y.channel(c).values).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                if classes[i] == 1 || !patterned.contains(&c) {
                    assert!(d < 1e-4, "{} {c}: {d}", x.session_id);
                } else if matches!(c, Channel::HeadHeading | Channel::Distance | Channel::FaceFear) {
                    assert!(d > 1.0e-3, "{} {c} unchanged", x.session_id);
                }
            }
        }
    }

    #[test]
    fn multi_camera_extraction_matches_front_geometry() {
        let ex = ExtractConfig::default();
        let (one, _) = synth_channel_sets(&short(1.0, 4), &ex).unwrap();
        let (three, _) = synth_channel_sets(&SynthConfig { cameras: 3, ..short(1.0, 4) }, &ex).unwrap();
        for (a, b) in one.iter().zip(&three) {
            assert_eq!(a.len(), b.len());
            let ha = &a.channel(Channel::HeadHeading).values;
            let hb = &b.channel(Channel::HeadHeading).values;
            let worst = ha.iter().zip(hb).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            assert!(worst < 5.0, "{worst}");
        }
    }

    #[test]
    fn same_seed_same_files() {
        let c = short(1.0, 5);
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        write_corpus(&c, d1.path()).unwrap();
        write_corpus(&c, d2.path()).unwrap();
        for rel in ["questionnaire.csv", "markers.csv", "calibration.json", "sessions.csv", "landmarks/s001.csv", "faces/s006.csv"] {
            assert_eq!(fs::read(d1.path().join(rel)).unwrap(), fs::read(d2.path().join(rel)).unwrap(), "{rel}");
        }
    }
}
