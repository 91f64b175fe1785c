use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("superoperator is not symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("vectors are not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("need at least {dim} outcomes for dimension {dim}, got {outcomes}")]
    TooFewOutcomes { outcomes: usize, dim: usize },

    #[error("{0} is not prime")]
    NotPrime(usize),

    #[error("POVM has no rank-1 weighted-state form")]
    MissingRank1Form,

    #[error("symmetric projector supports 2 or 3 copies, got {0}")]
    UnsupportedCopies(usize),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("POVM is not informationally complete (frame rank {rank}, need {required})")]
    NotInformationallyComplete { rank: usize, required: usize },

    #[error("outcome {outcome} has probability {probability:e} under the prior")]
    ZeroProbability { outcome: usize, probability: f64 },

    #[error("rescaling weight for outcome {outcome} is not positive ({value:e})")]
    NonPositiveWeight { outcome: usize, value: f64 },

    #[error("POVM element {outcome} has zero trace")]
    ZeroTraceElement { outcome: usize },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("{name} = {value} outside allowed range [{low}, {high}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("invalid outcome distribution: {0}")]
    InvalidDistribution(String),

    #[error("outcome index {index} out of range for {len} outcomes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid group count {groups} for {samples} samples")]
    BadGroupCount { groups: usize, samples: usize },

    #[error("bin count must be at least 1")]
    BadBinCount,

    #[error("malformed document: {0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
