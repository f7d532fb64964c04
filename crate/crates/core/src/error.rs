use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{value} is outside the table range 1..={limit}")]
    OutOfRange { value: u64, limit: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid modification: {0}")]
    InvalidModification(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("root-of-unity table for denominator {0} exceeds 2^30 entries; use a fixed-point angle")]
    TableTooLarge(u64),

    #[error("non-finite term at index {index}")]
    NonFinite { index: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Precondition,
    Resource,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::Json(_) => ErrorKind::Usage,
            Error::OutOfRange { .. } | Error::Resource(_) | Error::TableTooLarge(_) => {
                ErrorKind::Resource
            }
            Error::Domain(_)
            | Error::InvalidConfig(_)
            | Error::InvalidModification(_)
            | Error::Precondition(_)
            | Error::NonFinite { .. } => ErrorKind::Precondition,
        }
    }
}
