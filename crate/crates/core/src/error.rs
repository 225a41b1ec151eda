use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("invalid space declaration: {0}")]
    InvalidSpace(String),

    #[error("operands live in different graded spaces")]
    SpaceMismatch,

    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("argument {0} is not of homogeneous parity")]
    MixedParity(usize),

    #[error("cannot draw an odd element: the space has no fermionic coordinates")]
    NoOddCoordinates,

    #[error("invalid bracket spec: {0}")]
    InvalidSpec(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("bosonic degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: u32, cap: u32 },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
