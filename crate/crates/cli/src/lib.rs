//! Experiment harness: configuration, the experiment registry, the spectral
//! cache, concurrent runs and report emission.

pub mod cache;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod registry;
pub mod report;
pub mod run;

pub use config::{Caps, ExperimentConfig, Params};
pub use error::HarnessError;
pub use output::ExperimentOutput;
pub use registry::{ExperimentInfo, EXPERIMENTS};
pub use run::{run, Overrides, RunRecord, MANIFEST};
