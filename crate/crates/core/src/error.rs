use thiserror::Error;

use crate::offset::Transcript;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate instance: {0}")]
    DegenerateInstance(&'static str),

    #[error("marked set overflows the label space: s + (M-1)P = {last} > N-1 = {max}")]
    OverflowsLabelSpace { last: u64, max: u64 },

    #[error("period too large for strict mode: P^2 = {square} > N = {n}")]
    PeriodTooLarge { square: u64, n: u64 },

    #[error("marked set too large for strict mode: 2M = {double} > N = {n}")]
    MarkedSetTooLarge { double: u64, n: u64 },

    #[error("label {label} outside 0..{n}")]
    LabelOutOfRange { label: u64, n: u64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("transform is not unitary (norm defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("spectrum case {0} has no Dirichlet ratio")]
    CaseMismatch(crate::closedform::SpectrumCase),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("invalid continued fraction: quotient {index} is zero")]
    InvalidQuotient { index: usize },

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("verification failed for putative period {period}")]
    VerificationFailed {
        period: u64,
        transcript: Box<Transcript>,
    },

    #[error("offset search did not terminate within {limit} iterations")]
    NonTermination { limit: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
