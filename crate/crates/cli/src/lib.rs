//! Library half of the `hsurf` command-line tool: configuration, the
//! subcommands, output writers and the built-in identity suite.

pub mod check;
pub mod commands;
pub mod config;
pub mod output;

use hsurf::GeomError;
use thiserror::Error;

pub use config::{Config, SurfaceSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] GeomError),
    #[error("{0}")]
    Threshold(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for configuration and usage problems, 2 for numerical or domain
    /// failures, 3 when a validation threshold is missed.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Threshold(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
