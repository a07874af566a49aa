use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::ConfigFileError;
use crate::reduced::LogisticError;
use crate::solver::SolverError;
use crate::sweep::SweepError;

/// Top-level error for the harness; each variant maps to a process exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(#[from] ConfigFileError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Logistic(#[from] LogisticError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

fn solver_exit(e: &SolverError) -> i32 {
    match e {
        SolverError::NumericalBlowup { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(ConfigFileError::Io { .. }) | Error::Io { .. } => EXIT_IO,
            Error::Config(_) | Error::Logistic(_) => EXIT_CONFIG,
            Error::Solver(e) => solver_exit(e),
            Error::Sweep(e) if e.is_config() => EXIT_CONFIG,
            Error::Sweep(_) => EXIT_NUMERICAL,
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn create_dir(path: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
