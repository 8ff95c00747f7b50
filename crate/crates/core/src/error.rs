use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("signature error: {0}")]
    Signature(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("derivation error: {0}")]
    Derivation(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("divergence at mu-site {site}")]
    Divergence { site: usize },
    #[error("specification error: {0}")]
    Spec(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("specification is inconsistent (true = false provable)")]
    Inconsistent,
    #[error("no hidden-symbol-free witness in the class of {0}")]
    NoPureWitness(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }

    /// Process exit code for the CLI: 2 for malformed input, 3 resource/budget, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) | Error::Usage(_) | Error::Signature(_) | Error::Type(_) | Error::Derivation(_) | Error::Decode(_) | Error::Spec(_) | Error::NotFound(_) => 2,
            Error::Resource(_) | Error::Budget(_) | Error::Divergence { .. } => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
