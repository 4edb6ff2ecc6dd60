//! Error taxonomy shared by every module.
//!
//! The CLI maps these onto exit codes: a computation that finishes but whose
//! verification verdict is "fail" exits 1, any `Error` below exits 2.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Malformed or out-of-contract input (bad grid syntax, ratio outside
    /// (0,1), non-normalized measure, unknown JSON keys, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A configurable resource cap would be exceeded (cut-set cardinality,
    /// LP support size).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A schedule violates its defining inequalities (r_p <= 0, growth
    /// direction, non-decreasing sequences).
    #[error("schedule error: {0}")]
    Schedule(String),

    /// A constructive step produced an empty or inconsistent object.
    #[error("construction error: {0}")]
    Construction(String),

    /// An estimator was asked for a quantity the data cannot support
    /// (zero-mass ball, scale below the atom-resolution floor).
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Invariant breach that indicates a bug, not a user mistake.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
