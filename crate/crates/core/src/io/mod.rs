//! Configuration, checkpoints and CSV files.

pub mod checkpoint;
pub mod config;
pub mod csv;

pub use checkpoint::{Checkpoint, CheckpointError};
pub use config::{ConfigError, RunConfig, Spinup};
