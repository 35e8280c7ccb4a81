//! The 23 social-signal channels derived from a fused pose series, the
//! front-camera iris size and the facial-expression stream.

mod channels;
mod face;
mod pose;

pub use channels::{assemble_channels, read_channel_set, write_channel_set, Channel, ChannelSet, SignalChannel, Unit};
pub use face::{parse_face_stream, write_face_stream, FaceFrame, FaceStream, EXPRESSIONS};
pub use pose::{
    arm_opening, body_dimensions, body_velocity, estimate_distance, head_orientation, head_position,
    trunk_orientation, Orientation, IRIS_MM,
};
