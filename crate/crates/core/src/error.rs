//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("elements belong to different field specs ({0} vs {1})")]
    FieldMismatch(String, String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus is not monic of the expected degree")]
    BadModulus,

    #[error("polynomial is not irreducible over F_p")]
    NotIrreducible,

    #[error("no default modulus known for p={0}, m={1}; supply one explicitly")]
    NoDefaultModulus(u64, usize),

    #[error("the height of 0 is not defined")]
    HeightOfZero,

    #[error("divisor must be nonconstant")]
    ConstantDivisor,

    #[error("element does not lie in the localized ring")]
    NotInRing,

    #[error("localization element rejected: {0}")]
    BadLocalization(String),

    #[error("epsilon out of range: {0}")]
    EpsilonOutOfRange(u32),

    #[error("family of size {0} exceeds dimension {1}")]
    FamilyTooLarge(usize, usize),

    #[error("additive polynomial is not {0}")]
    NotOfClass(&'static str),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("variable {0} has no assigned value")]
    UnassignedVariable(String),

    #[error("exponent {0} is not a power of p={1}")]
    NotPPower(u64, u64),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("sort error: {0}")]
    Sort(String),

    #[error("formula is not in the supported fragment: {0}")]
    UnsupportedFormula(String),

    #[error("no admissible eta in F; enlarge the coefficient field")]
    NoAdmissibleEta,

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
