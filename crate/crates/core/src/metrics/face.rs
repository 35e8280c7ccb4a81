//! Facial-expression stream: `session_id,timestamp_ms,happiness,anger,disgust,fear,sadness,surprise,neutral`
//! per line, scores in `[0, 1]`. Blank lines and `#` comments are skipped.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const EXPRESSIONS: [&str; 7] = ["happiness", "anger", "disgust", "fear", "sadness", "surprise", "neutral"];

#[derive(Debug, Clone, PartialEq)]
pub struct FaceFrame {
    pub timestamp_ms: f64,
    /// Scores in [`EXPRESSIONS`] order.
    pub scores: [f64; 7],
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FaceStream {
    pub session_id: Option<String>,
    pub frames: Vec<FaceFrame>,
}

pub fn parse_face_stream<R: BufRead>(reader: R) -> Result<FaceStream> {
    let mut out = FaceStream::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        if fields.len() != 9 {
            return Err(Error::Format { line: line_no, msg: format!("expected 9 fields, found {}", fields.len()) });
        }
        match &out.session_id {
            None => out.session_id = Some(fields[0].to_string()),
            Some(s) if s != fields[0] => {
                return Err(Error::Format { line: line_no, msg: format!("session {:?} mixed into stream of {s:?}", fields[0]) })
            }
            Some(_) => {}
        }
        let num = |f: &str| -> Result<f64> {
            f.parse::<f64>().map_err(|_| Error::Format { line: line_no, msg: format!("cannot parse number from {f:?}") })
        };
        let ts = num(fields[1])?;
        if let Some(prev) = out.frames.last() {
            if ts <= prev.timestamp_ms {
                return Err(Error::NonMonotoneTimestamp { line: line_no, camera: "face".into(), ts });
            }
        }
        let mut scores = [0.0; 7];
        for (s, f) in scores.iter_mut().zip(&fields[2..]) {
            *s = num(f)?;
            if !(0.0..=1.0).contains(s) {
                return Err(Error::Format { line: line_no, msg: format!("expression score {s} outside [0,1]") });
            }
        }
        out.frames.push(FaceFrame { timestamp_ms: ts, scores });
    }
    Ok(out)
}

pub fn write_face_stream<W: Write>(mut w: W, session_id: &str, frames: &[FaceFrame]) -> std::io::Result<()> {
    for f in frames {
        write!(w, "{session_id},{:.3}", f.timestamp_ms)?;
        for s in &f.scores {
            write!(w, ",{s:.5}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}
