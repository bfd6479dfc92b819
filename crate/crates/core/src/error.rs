use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the detector library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("warp matrix is singular (det = {0:e})")]
    SingularWarp(f64),
    #[error("window size must be odd and >= 1, got {0}")]
    BadWindow(usize),
    #[error("image {width}x{height} is smaller than the 16x16 minimum")]
    TooSmall { width: usize, height: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown detector `{0}`")]
    UnknownDetector(String),
    #[error("pipeline parse error on line {line}: {msg}")]
    Pipeline { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the filesystem or file contents, as opposed to bad arguments.
    pub fn is_io_or_format(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Format(_) | Error::Pipeline { .. })
    }
}
