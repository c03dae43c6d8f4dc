use thiserror::Error;

/// Errors raised by the field, residue, cone and value computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported degree {0}: only g = 1 and g = 2 are implemented")]
    UnsupportedDegree(usize),
    #[error("{0} is not a positive fundamental discriminant")]
    NotFundamentalDiscriminant(i64),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("pole: the torsion point is trivial on generator {0}")]
    Pole(String),
    #[error("the torsion point is trivial")]
    TrivialTorsionPoint,
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("{j} is not coprime to the level {level}")]
    NotCoprime { j: i64, level: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not contained in the subfield Q(zeta_{0})")]
    NotInSubfield(u64),
    #[error("invalid ideal: {0}")]
    InvalidIdeal(String),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
