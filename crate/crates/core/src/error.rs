use thiserror::Error;

/// Errors raised by container construction and operations.
///
/// Each variant is an error *class*; the payload is a human-readable
/// diagnostic naming the offending operand, dimension or coordinate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unit error: {0}")]
    Unit(String),
    #[error("unit exponent overflow: {0}")]
    UnitOverflow(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("dimension error: {0}")]
    Dims(String),
    #[error("index out of bounds: {0}")]
    Bounds(String),
    #[error("view error: {0}")]
    View(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("coordinate mismatch: {0}")]
    Coord(String),
    #[error("key error: {0}")]
    Key(String),
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("bin-edge error: {0}")]
    Edges(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
