use thiserror::Error;

use crate::moments::FeasibilityCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Integer factorization gave up before resolving a cofactor.
    #[error("unresolved: {0}")]
    Unresolved(String),

    #[error("insufficient relations: relation lattice has rank {rank} of {needed} after {tested} candidates")]
    InsufficientRelations {
        rank: usize,
        needed: usize,
        tested: u64,
    },

    #[error("regulator rank deficient: found {found} independent units, need {needed}")]
    RegulatorRankDeficient { found: usize, needed: usize },

    #[error("certification failed at maximum precision ({0} bits)")]
    CertificationFailed(u32),

    #[error("moment constraints are infeasible")]
    Infeasible(Box<FeasibilityCertificate>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache conflict for key {0}")]
    CacheConflict(String),

    #[error("reference mismatch: {0}")]
    ReferenceMismatch(String),

    #[error("audit failure: {0}")]
    AuditFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
