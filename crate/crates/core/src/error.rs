use thiserror::Error;

/// Errors raised by the geometric engines. Unknown cohomology is not an
/// error; these are violated preconditions and malformed models.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("{model}: coordinate vector has length {found}, expected {expected}")]
    Length { model: String, expected: usize, found: usize },
    #[error("{model}: relation {relation:?} has degree {degree}, relations must have degree 0")]
    RelationDegree { model: String, relation: Vec<i64>, degree: i64 },
    #[error("{model}: canonical class has degree {found}, expected 2g - 2 = {expected}")]
    CanonicalDegree { model: String, expected: i64, found: i64 },
    #[error("{model}: {what}")]
    InvalidModel { model: String, what: String },
    #[error("{0}")]
    Precondition(String),
    #[error("{0} is not linear in n")]
    Nonlinear(String),
    #[error("{0} requires concrete coefficients")]
    Symbolic(String),
    #[error("theta characteristic rejected: {0}")]
    Theta(String),
    #[error("no Cartier index: {0}")]
    NoIndex(String),
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;
