use thiserror::Error;

use crate::arith::ArithError;
use crate::composition::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("system mismatch: expected {expected}, found {found}")]
    SystemMismatch { expected: String, found: String },
    #[error("invalid system {name}: {reason}")]
    InvalidSystem { name: String, reason: String },
    #[error("invalid state on {system}: {reason}")]
    InvalidState { system: String, reason: String },
    #[error("invalid effect on {system}: {reason}")]
    InvalidEffect { system: String, reason: String },
    #[error("vertex index {index} out of range 1..={dim}")]
    VertexOutOfRange { index: usize, dim: usize },
    #[error("system {0} has no deterministic effect in its effect model")]
    NoDeterministicEffect(String),
    #[error("system {0} has more than one deterministic effect")]
    NonUniqueDeterministicEffect(String),
    #[error("invalid composition rule: {0}")]
    InvalidRule(ValidationReport),
    #[error("no composition rule declared for ({left}, {right})")]
    MissingRule { left: String, right: String },
    #[error("unknown system {0}")]
    UnknownSystem(String),
    #[error("duplicate system name {0}")]
    DuplicateSystem(String),
    #[error("at most 3 factors are supported, got {0}")]
    TooManyFactors(usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("vertex set {0:?} is not jointly perfectly discriminable")]
    NotDiscriminable(Vec<usize>),
    #[error("vertex set {set:?} is not maximal: vertex {extendable_by} can be added")]
    NotMaximal { set: Vec<usize>, extendable_by: usize },
    #[error("state is not deterministic (coordinates sum to {0})")]
    NotDeterministic(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("internal inconsistency in analysis report: {0}")]
    InconsistentReport(String),
}
