use thiserror::Error;

use crate::space::VertexId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} is out of range (space has {1} vertices)")]
    InvalidVertex(VertexId, usize),

    #[error("capacity scale error: {0}")]
    CapacityScale(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("conflicting identification: vertex {vertex} of space {space} appears in two groups")]
    ConflictingIdentification { space: usize, vertex: VertexId },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("minimum cut is infinite: hard constraints are contradictory")]
    Infeasible,

    #[error("resolution exhausted: {0}")]
    ResolutionExhausted(String),

    #[error("ratio is undefined: zero denominator")]
    UndefinedRatio,

    #[error("no admissible escape point at distance >= {0}")]
    NoEscape(f64),

    #[error("internal invariant breached: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
