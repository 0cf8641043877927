//! File formats, configuration, the FFT preconditioner and the experiment
//! runner behind the `swflow` binary.

#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod fft;
pub mod io;
pub mod report;
pub mod run;
pub mod uspec;

use serde::Serialize;

/// Failure of a CLI verb, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(#[from] swcore::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("regression mismatch: {0}")]
    Regression(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) | CliError::Regression(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Solver(_) => "solver",
            CliError::Io(_) => "io",
            CliError::Regression(_) => "regression",
        }
    }

    /// One-line machine-readable form for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct E<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        serde_json::to_string(&E { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() }).expect("error serializes")
    }
}
