use std::path::PathBuf;

use thiserror::Error;

/// Failures reading a persisted map cache or field file.
#[derive(Debug, Error)]
pub enum CacheError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: Vec<u8> },
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u32),
    #[error("fingerprint mismatch: file was built for {found}, current problem is {expected}; re-run `offline`")]
    FingerprintMismatch { expected: String, found: String },
    #[error("corrupt file: {0}")]
    Corrupt(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid alignment: {what} at x = {x} is not a grid node (n_cells = {n_cells})")]
    Alignment { what: String, x: f64, n_cells: usize },

    #[error("solver did not converge{}: residual {residual:.3e} after {iterations} iterations", subdomain_suffix(*.subdomain))]
    NonConvergence {
        subdomain: Option<usize>,
        iterations: usize,
        residual: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stale low-rank map for subdomain {subdomain}: fingerprint does not match the current problem")]
    StaleMap { subdomain: usize },

    #[error(transparent)]
    Cache(#[from] CacheError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn subdomain_suffix(subdomain: Option<usize>) -> String {
    match subdomain {
        Some(m) => format!(" on subdomain {m}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Attach a subdomain id to a nonconvergence error raised by a local solve.
    pub fn on_subdomain(self, m: usize) -> Self {
        match self {
            Error::NonConvergence {
                subdomain: None,
                iterations,
                residual,
            } => Error::NonConvergence {
                subdomain: Some(m),
                iterations,
                residual,
            },
            other => other,
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Alignment { .. } | Error::Config(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::StaleMap { .. } | Error::Cache(_) => 4,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
