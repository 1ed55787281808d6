use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic 2 is not supported: quadric rank is undefined")]
    CharacteristicTwo,
    #[error("invalid characteristic {0}: expected 0 or an odd prime")]
    InvalidCharacteristic(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({0} and {1})")]
    MixedFields(u64, u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomial is not homogeneous")]
    Inhomogeneous,
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: u32, got: u32 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("singular substitution matrix")]
    SingularMatrix,
}

pub type Result<T> = std::result::Result<T, Error>;
