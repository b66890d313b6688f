use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    /// Instance document could not be parsed. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("{what} requires at most {cap} qubits, got {n}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("control and target must differ (both {0})")]
    QubitCollision(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    /// The first-order normalization `c = 1 - 2 dtau <H>` became non-positive.
    #[error("normalization c = {c} is not positive; reduce the imaginary-time step (dtau = {dtau})")]
    NonPositiveNormalization { c: f64, dtau: f64 },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("conflicting measurement basis on qubit {0}")]
    ConflictingBasis(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("restart count undefined: no ground state selects any route")]
    UndefinedRestarts,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
