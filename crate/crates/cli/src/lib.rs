//! Library side of the command-line front end: config parsing and file
//! emission, kept separate from the binary so they are testable directly.

pub mod config;
pub mod emit;

pub use config::{parse_config, ConfigError, Formats, ModeChoice, RunConfig};
pub use emit::{emit, EmitError};
