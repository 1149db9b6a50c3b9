use thiserror::Error;

use crate::perm::ElementId;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty request")]
    EmptyRequest,
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
    #[error("permutations range over different universes")]
    DomainMismatch,
    #[error("invalid position {0}; positions are 1-based")]
    InvalidPosition(usize),
    #[error("malformed permutation: {0}")]
    MalformedPermutation(String),
    #[error("invalid instance at `{field}`: {reason}")]
    InvalidInstance { field: String, reason: String },
    #[error("instance JSON: {0}")]
    Json(String),
    #[error("oracle limited to n <= {limit}, instance has n = {n}")]
    OracleTooLarge { n: usize, limit: usize },
    #[error("trace does not match instance: {0}")]
    TraceMismatch(String),
    #[error("step {step}: chosen element {element} is not in the request")]
    IllegalChoice { step: usize, element: ElementId },
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("phase schedule inconsistent with the cyclic partition: {0}")]
    ScheduleMismatch(String),
    #[error("the lower-bound construction requires r >= 2")]
    RequiresRAtLeast2,
    #[error("audit requires an MTF-based or fixed-permutation baseline")]
    AuditRequiresBaseline,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
