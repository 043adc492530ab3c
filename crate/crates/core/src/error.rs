use thiserror::Error;

use crate::pauli::PauliString;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("dense representation requested for {n_qubits} qubits, bound is {bound}")]
    OracleBound { n_qubits: usize, bound: usize },

    #[error("invalid Pauli string {0:?}")]
    InvalidPauli(String),

    #[error("DLA closure exceeded {max_dim} elements")]
    ClosureExceeded { max_dim: usize },

    #[error("commutator of basis elements {alpha} and {beta} falls outside the basis")]
    ClosureViolation { alpha: usize, beta: usize },

    #[error("observable terms outside the DLA basis: {}", .0.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))]
    TermOutsideDla(Vec<PauliString>),

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    TargetOutOfRange { qubit: usize, n_qubits: usize },

    #[error("parameter slot {slot} not resolvable in a vector of length {len}")]
    UnresolvedSlot { slot: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
