//! Line-delimited landmark stream.
//!
//! One record per line, comma separated, UTF-8:
//!
//! ```text
//! session_id,camera_id,timestamp_ms,x0,y0,z0,v0,x1,y1,z1,v1,...,x32,y32,z32,v32[,iris_diameter_px]
//! ```
//!
//! `camera_id` is `front`, `left` or `right`. The trailing iris field may be
//! omitted or left empty. Blank lines and lines starting with `#` are
//! skipped. A stream carries exactly one session.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::{CameraFrame, CameraId, LandmarkPoint, NUM_LANDMARKS};
use crate::error::{Error, Result};

const HEAD_FIELDS: usize = 3;
const POINT_FIELDS: usize = 4;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LandmarkStream {
    /// `None` only for an empty stream.
    pub session_id: Option<String>,
    pub frames: Vec<CameraFrame>,
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Format { line, msg: format!("cannot parse {what} from {field:?}") })
}

pub fn parse_landmark_stream<R: BufRead>(reader: R) -> Result<LandmarkStream> {
    let mut out = LandmarkStream::default();
    let mut last_ts: HashMap<CameraId, f64> = HashMap::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() < HEAD_FIELDS {
            return Err(Error::Format { line: line_no, msg: "truncated record".into() });
        }
        let payload = fields.len() - HEAD_FIELDS;
        let (points_len, iris_field) = match payload % POINT_FIELDS {
            0 => (payload, None),
            1 => (payload - 1, Some(fields[fields.len() - 1])),
            _ => {
                return Err(Error::Format {
                    line: line_no,
                    msg: format!("{payload} payload fields do not form whole landmarks"),
                })
            }
        };
        if points_len / POINT_FIELDS != NUM_LANDMARKS {
            return Err(Error::LandmarkCount { line: line_no, found: points_len / POINT_FIELDS });
        }

        let session = fields[0].trim();
        if session.is_empty() {
            return Err(Error::Format { line: line_no, msg: "empty session id".into() });
        }
        match &out.session_id {
            None => out.session_id = Some(session.to_string()),
            Some(s) if s != session => {
                return Err(Error::Format {
                    line: line_no,
                    msg: format!("session {session:?} mixed into stream of {s:?}"),
                })
            }
            Some(_) => {}
        }
        let camera: CameraId = fields[1]
            .trim()
            .parse()
            .map_err(|e: Error| Error::Format { line: line_no, msg: e.to_string() })?;
        let ts = parse_f64(fields[2], line_no, "timestamp")?;
        if !ts.is_finite() {
            return Err(Error::Format { line: line_no, msg: "non-finite timestamp".into() });
        }
        if let Some(&prev) = last_ts.get(&camera) {
            if ts <= prev {
                return Err(Error::NonMonotoneTimestamp { line: line_no, camera: camera.to_string(), ts });
            }
        }
        last_ts.insert(camera, ts);

        let mut landmarks = [LandmarkPoint::default(); NUM_LANDMARKS];
        for (j, lm) in landmarks.iter_mut().enumerate() {
            let base = HEAD_FIELDS + j * POINT_FIELDS;
            *lm = LandmarkPoint::new(
                parse_f64(fields[base], line_no, "x")?,
                parse_f64(fields[base + 1], line_no, "y")?,
                parse_f64(fields[base + 2], line_no, "z")?,
                parse_f64(fields[base + 3], line_no, "visibility")?,
            );
            if !lm.is_well_formed() {
                return Err(Error::Format {
                    line: line_no,
                    msg: format!("landmark {j} out of range (finite coordinates, visibility in [0,1])"),
                });
            }
        }
        let iris = match iris_field.map(str::trim) {
            None | Some("") => None,
            Some(f) => Some(parse_f64(f, line_no, "iris diameter")?),
        };

        out.frames.push(CameraFrame { camera, timestamp_ms: ts, landmarks, iris_diameter_px: iris });
    }
    Ok(out)
}

/// Writes frames in the stream format. Coordinates keep six decimals and
/// timestamps three, which is well below extractor noise.
pub fn write_landmark_stream<W: Write>(mut w: W, session_id: &str, frames: &[CameraFrame]) -> std::io::Result<()> {
    let mut line = String::with_capacity(1200);
    for f in frames {
        line.clear();
        use std::fmt::Write as _;
        let _ = write!(line, "{session_id},{},{:.3}", f.camera, f.timestamp_ms);
        for p in &f.landmarks {
            let _ = write!(line, ",{:.6},{:.6},{:.6},{:.4}", p.x, p.y, p.z, p.visibility);
        }
        if let Some(iris) = f.iris_diameter_px {
            let _ = write!(line, ",{iris:.4}");
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}
