use thiserror::Error;

use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("weight value overflows f64 at index {0}")]
    OverflowAtIndex(usize),
    #[error("no certified tail bound at N={n}, r={r}; raise N")]
    BoundUnavailable { n: usize, r: f64 },
    #[error("invalid weight parameters: {0}")]
    InvalidParameters(String),
    #[error("unknown weight `{0}`")]
    UnknownWeight(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeqError {
    #[error("cycle must be nonempty")]
    EmptyCycle,
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("pointwise operation undefined at index {0}")]
    PointwiseDomain(usize),
    #[error("window [{lo}, {hi}] exceeds horizon {horizon}")]
    HorizonExceeded { lo: usize, hi: usize, horizon: usize },
    #[error("combined cycle length exceeds {0}")]
    CycleTooLong(usize),
    #[error("invalid window: lo={lo} > hi={hi}")]
    InvalidWindow { lo: usize, hi: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("weight mismatch: `{0}` vs `{1}`")]
    WeightMismatch(String, String),
    #[error("operation needs an eventually periodic element; horizon-limited input only gives advisory answers")]
    HorizonCertifiedOnly,
    #[error("not invertible: normalized coefficient vanishes at index {0}")]
    NotInvertible(usize),
    #[error("not divisible: divisor vanishes at index {0} where the dividend does not")]
    NotDivisible(usize),
    #[error("not in ideal: generators vanish at index {0} where the element does not")]
    NotInIdeal(usize),
    #[error("corona condition fails at index {0}")]
    CoronaFails(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("mask value at index {0} is not 0 or 1")]
    BadMask(usize),
    #[error("empty input list")]
    EmptyInput,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inconsistent system at coefficient position {position}")]
    Inconsistent { position: usize, witness: Vec<C64> },
    #[error("matrix not invertible at coefficient position {0}")]
    NotInGL(usize),
    #[error("determinant differs from the unit at coefficient position {position} (deviation {deviation:e})")]
    NotSL { position: usize, deviation: f64 },
    #[error("eigen and contour logarithms disagree at position {position} by {difference:e}")]
    QuadratureDisagreement { position: usize, difference: f64 },
    #[error("subdivision exceeded {max_steps} steps")]
    SubdivisionOverflow { max_steps: usize },
    #[error("point lies on the spectrum at coefficient position {0}")]
    SpectrumHit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
