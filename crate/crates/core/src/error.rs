use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside the supported range 1..=24")]
    QubitCount(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("unsupported walk step: {0}")]
    UnsupportedStep(String),
    #[error("infeasible hitting-set instance: {0}")]
    Infeasible(String),
    #[error("instance too large: {0}")]
    ResourceLimit(String),
    #[error("walk order does not cover the target state: {0}")]
    Coverage(String),
    #[error("degenerate merge: both amplitudes are zero")]
    DegenerateMerge,
    #[error("gate body is not special unitary; use the general lowering")]
    WrongLowering,
    #[error("circuit is not lowered: {0}")]
    NotLowered(String),
    #[error("not unitary: {0}")]
    NotUnitary(String),
    #[error("parse error: {0}")]
    Parse(String),
}
