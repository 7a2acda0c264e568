//! Exact ground-state references: dense diagonalization for small registers,
//! symmetry-blocked dense diagonalization, and matrix-free Lanczos.

mod dense;
mod lanczos;
mod sector;

use serde::Serialize;

use crate::state::StateVector;

pub use dense::{dense_ground, dense_matrix, DENSE_MAX_QUBITS};
pub use lanczos::{lanczos_ground, lanczos_with, LanczosOptions, LANCZOS_MAX_QUBITS};
pub use sector::{
    blocked_dense_ground, sector_dense_ground, sector_ground, sector_penalty, SectorBasis,
    SectorOptions, SECTOR_DENSE_MAX_DIM,
};

/// Residual above which a result is reported as not converged.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub ground_energy: f64,
    pub ground_state: Option<StateVector<f64>>,
    /// `‖Hψ − Eψ‖` of the returned eigenpair.
    pub residual: f64,
    pub method: Method,
    /// Matrix-vector products (Lanczos) or matrix dimension (dense).
    pub work: usize,
}
