use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid arc diagram: {0}")]
    InvalidDiagram(String),
    #[error("component {0} is not an interval")]
    NotAnInterval(usize),
    #[error("domain mismatch: {0}")]
    Domain(String),
    #[error("NC_{0} has zero differential, so no acyclicity witness exists")]
    NoWitness(usize),
    #[error("unknown interval label {0}")]
    UnknownLabel(String),
    #[error("invalid sutured surface: {0}")]
    InvalidSurface(String),
    #[error("standard basis does not fit the surface: {0}")]
    BasisMismatch(String),
    #[error("basis is not adapted to the gluing: {0}")]
    NotAdapted(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
