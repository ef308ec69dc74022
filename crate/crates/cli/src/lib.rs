//! Experiment harness: configured runs of the inertial augmented-Lagrangian
//! dynamics, the standard experiment matrix, CSV diagnostics, rate-fit
//! summaries and pass/fail reports.

pub mod config;
pub mod harness;
pub mod matrix;
pub mod output;

use std::io;
use std::path::{Path, PathBuf};

pub use config::{InitialConditions, ProblemSelector, RunConfig, ScheduleConfig};
pub use harness::{execute, run, Check, RunOutput, RunReport};
pub use matrix::{run_matrix, standard_matrix, MatrixSummary};
pub use output::{emit_plotdata, read_csv, write_csv, CSV_HEADER};

/// Overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "TRIALS_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: malformed data: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] trials_core::Error),
}

impl HarnessError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
