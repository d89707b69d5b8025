//! Command-line front end for `rotwave-core`.
//!
//! Each command is a pure function from a [`config::RunConfig`] to an
//! [`Outcome`]: the data files it produces and a text report. Routing the
//! outcome to files or standard streams happens in [`emit`].

pub mod commands;
pub mod config;
pub mod output;
pub mod suite;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2.
    #[error("usage: {0}")]
    Usage(String),
    /// A check in `verify` failed; exit code 1.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<rotwave_core::Error> for CliError {
    fn from(e: rotwave_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// A produced file, named by extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutFile {
    pub ext: &'static str,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub files: Vec<OutFile>,
    /// File written to stdout when no `--out` stem is given.
    pub primary: Option<usize>,
    pub report: String,
    /// Set by `verify` when a check fails.
    pub failed: bool,
}

impl Outcome {
    pub fn report_only(report: String) -> Self {
        Outcome { files: Vec::new(), primary: None, report, failed: false }
    }

    pub fn file(&self, ext: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.ext == ext).map(|f| f.bytes.as_slice())
    }
}

/// With a stem, write every file and print the report on stdout. Without,
/// the primary file goes to stdout and the report to stderr.
pub fn emit(outcome: &Outcome, stem: Option<&Path>) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    let stdout = Path::new("<stdout>");
    match (stem, outcome.primary) {
        (Some(stem), _) => {
            for f in &outcome.files {
                let path = stem.with_extension(f.ext);
                std::fs::write(&path, &f.bytes).map_err(io(&path))?;
            }
            std::io::stdout().write_all(outcome.report.as_bytes()).map_err(io(stdout))
        }
        (None, Some(i)) => {
            std::io::stdout().write_all(&outcome.files[i].bytes).map_err(io(stdout))?;
            std::io::stderr().write_all(outcome.report.as_bytes()).map_err(io(Path::new("<stderr>")))
        }
        (None, None) => std::io::stdout().write_all(outcome.report.as_bytes()).map_err(io(stdout)),
    }
}
