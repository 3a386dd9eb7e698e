//! File formats, synthetic benchmarks and experiment drivers around
//! [`bagtrack_core`].

pub mod ablation;
pub mod config;
pub mod error;
pub mod frames;
pub mod ground_truth;
pub mod manifest;
pub mod metrics;
pub mod pgm;
pub mod report;
pub mod run;
pub mod synth;

pub use error::{Error, Result};
