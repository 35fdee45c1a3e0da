use thiserror::Error;

use crate::model::{JobId, Time};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("job {id}: invalid field `{field}`: {reason}")]
    InvalidJob {
        id: JobId,
        field: &'static str,
        reason: String,
    },

    #[error("duplicate job id {0}")]
    DuplicateJob(JobId),

    #[error("unknown job id {0}")]
    UnknownJob(JobId),

    #[error("job {0} is not scheduled")]
    Unscheduled(JobId),

    #[error("resource index {index} out of range 1..={s}")]
    ResourceOutOfRange { index: i64, s: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid replenishment structure: {0}")]
    InvalidReplenishments(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("reported costs do not match: {0}")]
    CostMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported objective {0}")]
    UnsupportedObjective(String),

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("illegal decision at t={t}: {reason}")]
    IllegalDecision { t: Time, reason: String },

    #[error("policy stalled: {0}")]
    Stalled(String),

    #[error("incompatible adversary and policy: {0}")]
    Incompatible(String),
}
