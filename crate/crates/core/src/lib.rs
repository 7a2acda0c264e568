//! Variational quantum eigensolver engine for the Z2 lattice gauge theory
//! coupled to staggered fermions on a two-leg ladder.
//!
//! The simulation core ([`pauli`], [`state`], [`hamiltonian`], [`ansatz`]) is
//! generic over the real scalar type; the optimizers, the exact reference
//! solvers and the experiment drivers run in double precision. The aliases at
//! the crate root name the double-precision instantiations.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod lattice;
pub mod optimize;
pub mod oracle;
pub mod pauli;
pub mod scalar;
pub mod state;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PauliSum = pauli::PauliSum<f64>;
pub type PauliSum32 = pauli::PauliSum<f32>;
pub type StateVector = state::StateVector<f64>;
pub type StateVector32 = state::StateVector<f32>;
pub type Gate = state::Gate<f64>;
pub type HamiltonianBundle = hamiltonian::HamiltonianBundle<f64>;

pub use ansatz::{AnsatzKind, ParamCircuit};
pub use hamiltonian::ModelParams;
pub use lattice::{Direction, LadderLattice, Link, Site, StaticCharges};
pub use pauli::{PauliString, Phase};
