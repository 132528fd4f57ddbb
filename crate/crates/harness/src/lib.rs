//! Experiment harness for random k-SAT solution geometry: DIMACS I/O, exact
//! tiny-universe verification, Monte-Carlo drivers and report emission.

pub mod dimacs;
mod error;
pub mod experiments;
pub mod report;
pub mod verify;

pub use error::{HarnessError, Result};
pub use experiments::{CertifyKind, ExperimentConfig, OutputFormat};
pub use verify::{verify_identity, TinyUniverseReport};
