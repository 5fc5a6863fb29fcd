//! Benchmark pipelines around the trotter-core library: annealing runs,
//! bound comparisons over model families, scaling fits, and SVG plots,
//! all emitting deterministic CSV artifacts.

pub mod config;
pub mod csv;
pub mod error;
pub mod experiments;
pub mod scaling;
pub mod svg;

pub use config::{ExperimentConfig, ModelSelector, TimeRule};
pub use error::{HarnessError, Result};
