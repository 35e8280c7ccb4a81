use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::face::FaceFrame;
use super::pose::{arm_opening, body_dimensions, body_velocity, estimate_distance, head_orientation, head_position, trunk_orientation};
use crate::error::{Error, Result};
use crate::ingest::{grid_timestamp, FusedPoseSeries};

/// Face samples farther than this from a grid frame leave it missing.
pub const FACE_MAX_GAP_MS: f64 = 250.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unit {
    Degrees,
    NormalizedUnits,
    UnitsPerSecond,
    Millimeters,
    Probability,
}

macro_rules! channels {
    ($($variant:ident => $name:literal, $unit:ident;)*) => {
        /// The 23 canonical channels, in canonical order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum Channel { $($variant),* }

        impl Channel {
            pub const ALL: [Channel; 23] = [$(Channel::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(Channel::$variant => $name),* }
            }

            pub fn unit(self) -> Unit {
                match self { $(Channel::$variant => Unit::$unit),* }
            }
        }
    };
}

channels! {
    HeadHeading => "head_heading", Degrees;
    HeadPitch => "head_pitch", Degrees;
    HeadTilt => "head_tilt", Degrees;
    TrunkHeading => "trunk_heading", Degrees;
    TrunkPitch => "trunk_pitch", Degrees;
    TrunkTilt => "trunk_tilt", Degrees;
    BodyWidth => "body_width", NormalizedUnits;
    BodyHeight => "body_height", NormalizedUnits;
    BodyDepth => "body_depth", NormalizedUnits;
    VelocityX => "velocity_x", UnitsPerSecond;
    VelocityY => "velocity_y", UnitsPerSecond;
    VelocityZ => "velocity_z", UnitsPerSecond;
    HeadVertical => "head_vertical", NormalizedUnits;
    HeadSagittal => "head_sagittal", NormalizedUnits;
    ArmOpening => "arm_opening", Degrees;
    Distance => "distance", Millimeters;
    FaceHappiness => "face_happiness", Probability;
    FaceAnger => "face_anger", Probability;
    FaceDisgust => "face_disgust", Probability;
    FaceFear => "face_fear", Probability;
    FaceSadness => "face_sadness", Probability;
    FaceSurprise => "face_surprise", Probability;
    FaceNeutral => "face_neutral", Probability;
}

impl Channel {
    pub fn index(self) -> usize {
        Channel::ALL.iter().position(|c| *c == self).unwrap()
    }

    pub fn is_face(self) -> bool {
        self.unit() == Unit::Probability
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| Error::invalid(format!("unknown channel {s:?}")))
    }
}

/// One named series at 30 Hz. Missing samples hold NaN and are flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalChannel {
    pub channel: Channel,
    pub values: Vec<f64>,
    pub missing: Vec<bool>,
}

impl SignalChannel {
    pub fn from_options(channel: Channel, samples: impl IntoIterator<Item = Option<f64>>) -> Self {
        let (values, missing) = samples.into_iter().map(|s| (s.unwrap_or(f64::NAN), s.is_none())).unzip();
        Self { channel, values, missing }
    }

    pub fn from_values(channel: Channel, values: Vec<f64>) -> Self {
        let missing = vec![false; values.len()];
        Self { channel, values, missing }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn all_missing(&self) -> bool {
        self.missing.iter().all(|m| *m)
    }

    pub fn any_missing(&self) -> bool {
        self.missing.iter().any(|m| *m)
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        (!self.missing[i]).then_some(self.values[i])
    }
}

/// All 23 channels of one interaction, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub session_id: String,
    pub channels: Vec<SignalChannel>,
}

impl ChannelSet {
    pub fn new(session_id: impl Into<String>, channels: Vec<SignalChannel>) -> Result<Self> {
        let set = Self { session_id: session_id.into(), channels };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.len() != Channel::ALL.len() {
            return Err(Error::Schema(format!("{}: {} channels, expected 23", self.session_id, self.channels.len())));
        }
        let len = self.len();
        for (c, want) in self.channels.iter().zip(Channel::ALL) {
            if c.channel != want {
                return Err(Error::Schema(format!("{}: channel {} out of canonical order", self.session_id, c.channel)));
            }
            if c.values.len() != len || c.missing.len() != len {
                return Err(Error::Schema(format!("{}: channel {} has mismatched length", self.session_id, c.channel)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, SignalChannel::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, c: Channel) -> &SignalChannel {
        &self.channels[c.index()]
    }

    pub fn map_channels(&self, f: impl Fn(&SignalChannel) -> SignalChannel) -> ChannelSet {
        ChannelSet { session_id: self.session_id.clone(), channels: self.channels.iter().map(f).collect() }
    }
}

/// Nearest face frame for each grid frame, within [`FACE_MAX_GAP_MS`].
fn align_faces(faces: &[FaceFrame], n: usize) -> Vec<Option<&FaceFrame>> {
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let t = grid_timestamp(k as i64);
        while j + 1 < faces.len() && (faces[j + 1].timestamp_ms - t).abs() <= (faces[j].timestamp_ms - t).abs() {
            j += 1;
        }
        out.push(faces.get(j).filter(|f| (f.timestamp_ms - t).abs() <= FACE_MAX_GAP_MS));
    }
    out
}

/// Computes every channel on the fused pose grid. `focal_px` is the front
/// camera's focal length; without it the distance channel is fully missing.
pub fn assemble_channels(session_id: &str, poses: &FusedPoseSeries, faces: &[FaceFrame], focal_px: Option<f64>) -> Result<ChannelSet> {
    if poses.is_empty() {
        return Err(Error::invalid(format!("{session_id}: empty pose series")));
    }
    let n = poses.len();
    let head: Vec<_> = poses.frames.iter().map(head_orientation).collect();
    let trunk: Vec<_> = poses.frames.iter().map(trunk_orientation).collect();
    let dims: Vec<_> = poses.frames.iter().map(body_dimensions).collect();
    let headpos: Vec<_> = poses.frames.iter().map(head_position).collect();
    let [vx, vy, vz] = body_velocity(&poses.frames);
    let distance: Vec<Option<f64>> =
        poses.iris_px.iter().map(|iris| iris.zip(focal_px).and_then(|(i, f)| estimate_distance(i, f))).collect();
    let face = align_faces(faces, n);

    let mut chans = Vec::with_capacity(23);
    for c in Channel::ALL {
        let samples: Vec<Option<f64>> = match c {
            Channel::HeadHeading => head.iter().map(|o| o.map(|o| o.heading)).collect(),
            Channel::HeadPitch => head.iter().map(|o| o.map(|o| o.pitch)).collect(),
            Channel::HeadTilt => head.iter().map(|o| o.map(|o| o.tilt)).collect(),
            Channel::TrunkHeading => trunk.iter().map(|o| o.map(|o| o.heading)).collect(),
            Channel::TrunkPitch => trunk.iter().map(|o| o.map(|o| o.pitch)).collect(),
            Channel::TrunkTilt => trunk.iter().map(|o| o.map(|o| o.tilt)).collect(),
            Channel::BodyWidth => dims.iter().map(|d| d.map(|d| d[0])).collect(),
            Channel::BodyHeight => dims.iter().map(|d| d.map(|d| d[1])).collect(),
            Channel::BodyDepth => dims.iter().map(|d| d.map(|d| d[2])).collect(),
            Channel::VelocityX => vx.clone(),
            Channel::VelocityY => vy.clone(),
            Channel::VelocityZ => vz.clone(),
            Channel::HeadVertical => headpos.iter().map(|h| h.map(|h| h.0)).collect(),
            Channel::HeadSagittal => headpos.iter().map(|h| h.map(|h| h.1)).collect(),
            Channel::ArmOpening => poses.frames.iter().map(arm_opening).collect(),
            Channel::Distance => distance.clone(),
            face_channel => {
                let e = face_channel.index() - Channel::FaceHappiness.index();
                face.iter().map(|f| f.map(|f| f.scores[e])).collect()
            }
        };
        chans.push(SignalChannel::from_options(c, samples));
    }
    ChannelSet::new(session_id, chans)
}

/// Columnar export: a `# session=<id>` line, a header `frame,<23 names>`,
/// then one row per frame. Missing samples are written as `NA`.
pub fn write_channel_set<W: Write>(mut w: W, set: &ChannelSet) -> std::io::Result<()> {
    writeln!(w, "# session={}", set.session_id)?;
    write!(w, "frame")?;
    for c in &set.channels {
        write!(w, ",{}", c.channel)?;
    }
    writeln!(w)?;
    let mut line = String::new();
    for i in 0..set.len() {
        use std::fmt::Write as _;
        line.clear();
        let _ = write!(line, "{i}");
        for c in &set.channels {
            match c.get(i) {
                Some(v) => {
                    let _ = write!(line, ",{v}");
                }
                None => line.push_str(",NA"),
            }
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn read_channel_set<R: BufRead>(reader: R) -> Result<ChannelSet> {
    let mut session = None;
    let mut header: Option<Vec<Channel>> = None;
    let mut columns: Vec<Vec<Option<f64>>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Format { line: line_no, msg: e.to_string() })?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(id) = rest.trim().strip_prefix("session=") {
                session = Some(id.to_string());
            }
            continue;
        }
        let fields: Vec<&str> = t.split(',').collect();
        match &header {
            None => {
                if fields.first() != Some(&"frame") {
                    return Err(Error::Format { line: line_no, msg: "header must start with `frame`".into() });
                }
                let names = fields[1..].iter().map(|s| s.parse()).collect::<Result<Vec<Channel>>>()?;
                columns = vec![Vec::new(); names.len()];
                header = Some(names);
            }
            Some(names) => {
                if fields.len() != names.len() + 1 {
                    return Err(Error::Format { line: line_no, msg: "row width differs from header".into() });
                }
                for (col, f) in columns.iter_mut().zip(&fields[1..]) {
                    let v = match *f {
                        "NA" => None,
                        s => Some(s.parse::<f64>().map_err(|_| Error::Format { line: line_no, msg: format!("bad value {s:?}") })?),
                    };
                    col.push(v);
                }
            }
        }
    }
    let names = header.ok_or_else(|| Error::Format { line: 0, msg: "missing header".into() })?;
    let session = session.ok_or_else(|| Error::Format { line: 0, msg: "missing `# session=` line".into() })?;
    let chans = names.into_iter().zip(columns).map(|(c, col)| SignalChannel::from_options(c, col)).collect();
    ChannelSet::new(session, chans)
}
