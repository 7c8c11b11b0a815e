use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("beam splitter needs two distinct modes, got ({0}, {0})")]
    SameMode(usize),
    #[error("malformed network: {0}")]
    MalformedNetwork(String),
    #[error("matrix too large for exact evaluation: n = {n}, limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("subsystem {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },
    #[error("structure {0} does not factor into subsystems")]
    NotFactorizable(String),
    #[error("operation needs a Fock structure")]
    NotFock,
    #[error("Lindblad problem needs at least one collapse operator")]
    NoDissipation,
    #[error("steady state is not unique: {multiplicity} near-zero singular values (second smallest {second_smallest:e})")]
    DegenerateSteadyState {
        multiplicity: usize,
        second_smallest: f64,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type QResult<T> = Result<T, QError>;
