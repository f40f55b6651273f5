use thiserror::Error;

/// Errors raised by the algebraic and topological routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("operands live in different coefficient fields")]
    FieldMismatch,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("Mahler measure certification did not reach tolerance {tol:e} (best bound {achieved:e})")]
    ToleranceNotReached { tol: f64, achieved: f64 },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field of characteristic {characteristic} has no element of order {order}")]
    OrderUnavailable { characteristic: u64, order: u64 },
    #[error("field too small: need {needed} distinct nonzero elements, have {available}")]
    FieldTooSmall { needed: u64, available: u64 },
    #[error("illegal elementary operation: {0}")]
    IllegalOp(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid epimorphism: {0}")]
    InvalidEpimorphism(String),
    #[error("invalid character: {0}")]
    CharacterInvalid(String),
    #[error("invalid orbifold type: {0}")]
    InvalidType(String),
    #[error("invalid character profile: {0}")]
    InvalidProfile(String),
    #[error("degree {degree} out of range (complex has degrees 0..{top})")]
    DegreeOutOfRange { degree: usize, top: usize },
    #[error("multiplicity m1 = {0} is too small, need m1 >= 3")]
    MultiplicityTooSmall(u64),
    #[error("degenerate arrangement: {0}")]
    DegenerateInput(String),
    #[error("not an epimorphism: {0}")]
    NotEpimorphism(String),
    #[error("multinet has {0} classes; the certificate needs exactly 3")]
    NotAThreeNet(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
}

pub type Result<T> = std::result::Result<T, Error>;
