use thiserror::Error;

use crate::lattice::Site;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("site ({}, {}) is not on the lattice", .0.col, .0.leg)]
    OffLattice(Site),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("capacity exceeded: {what} needs {requested} but the limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("operator is not hermitian: {0}")]
    NotHermitian(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} did not converge (best estimate {best:.12})")]
    NotConverged { what: &'static str, best: f64 },

    #[error("non-finite cost encountered at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
