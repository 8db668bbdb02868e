use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),
    #[error("ambiguous contact pairing: body {body} face {face} has {candidates} partners")]
    AmbiguousPairing {
        body: usize,
        face: usize,
        candidates: usize,
    },
    #[error("missing face tags: {0}")]
    Tagging(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
