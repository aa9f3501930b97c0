use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has non-positive or non-finite determinant {0}")]
    BadDeterminant(f64),
    #[error("operation needs a parabolic or hyperbolic map")]
    NotApplicable,
    #[error("two of the fixed points coincide")]
    SharedFixedPoint,
    #[error("identity map given as a generator")]
    IdentityInput,
    #[error("commutator trace {0} does not exceed 2")]
    CommutatorTraceNotAboveTwo(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("non-positive multiplier {0}")]
    NonpositiveInput(f64),
    #[error("word enumeration cap of {0} products exceeded")]
    CapExceeded(usize),
    #[error("generator {0} does not map the interval into itself")]
    NotInvariant(usize),
    #[error("invalid Schottky parameters: {0}")]
    InvalidSchottkyParams(String),
    #[error("degenerate arc: endpoints coincide")]
    DegenerateArc,
    #[error("malformed word: {0}")]
    BadWord(String),
}

pub type Result<T> = std::result::Result<T, Error>;
