//! Run configuration, command dispatch and CSV/JSON output for the
//! `dlogistic` binary.

mod commands;
mod config;
mod figures;
mod format;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{run, Report};
pub use config::{
    parse_config, parse_config_file, parse_kernel_spec, CommandName, FigureId, FileConfig, RunConfig,
    OUT_DIR_ENV,
};
pub use figures::reproduce_figure;
pub use format::{format_float, write_report, Cell, Table};

/// Failure of a CLI run, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical failure: {0}")]
    Numerical(crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidParameter { .. } | crate::Error::StepTooLarge { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other),
        }
    }
}
