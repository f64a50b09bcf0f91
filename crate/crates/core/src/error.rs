use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("invalid mechanism: {0}")]
    InvalidMechanism(String),

    #[error("job {job} is unavailable on machine {machine}")]
    Unavailable { job: usize, machine: usize },

    #[error("job {job} is not in the given job set")]
    JobNotInSet { job: usize },

    #[error("{candidates} candidate assignments exceed the cap of {cap}; raise --cap to at least {candidates} or enable branch-and-bound")]
    CapExceeded { candidates: u128, cap: u128 },

    #[error("unknown generator kind {0:?} (expected uniform-integer, restricted-related, or two-values)")]
    UnknownGenerator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
