//! Social-signal time series from multi-camera pose and face streams,
//! three feature engines, and leave-one-out satisfaction classification.

pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod metrics;
pub mod models;
pub mod pipeline;
pub mod preprocess;
pub mod synth;

pub use error::{Error, Result};
