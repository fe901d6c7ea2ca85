//! Library side of the `byzsel` command-line tool, split out so the
//! commands and file parsers can be tested and fuzzed directly.

pub mod commands;
pub mod error;
pub mod input;
pub mod render;

pub use commands::{run, Command, OutputOptions, Report, VerifyOptions};
pub use error::CliError;
