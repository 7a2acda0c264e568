//! Pauli-string algebra in the symplectic (x-mask, z-mask) representation.
//!
//! Qubit `k` of a [`PauliString`] carries `X` when only bit `k` of the x-mask
//! is set, `Z` when only the z-mask bit is set, `Y` when both are set and the
//! identity otherwise. The global phase is one of the fourth roots of unity.
//! Qubit `k` corresponds to bit `k` of a computational basis index.

mod string;
mod sum;
mod text;

pub use string::{Pauli, PauliString, Phase, MAX_QUBITS};
pub use sum::{PauliSum, DEFAULT_DROP_TOL};
