use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("point set is not a union of group orbits (orbit {orbit} is split)")]
    NotAdmitted { orbit: usize },

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
