//! VQE cost evaluation, gradients and the two optimizers.

mod bfgs;
mod spsa;
mod trace;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::ParamCircuit;
use crate::error::{Error, Result};
use crate::hamiltonian::GaussOperator;
use crate::lattice::StaticCharges;
use crate::pauli::PauliSum;
use crate::state::{gauss_fidelity, sample_expectation, CompiledOperator, Gate, StateVector};

pub use bfgs::{gradient_minimize, GradientConfig};
pub use spsa::{spsa_gradient, spsa_minimize, SpsaConfig};
pub use trace::{
    write_theta_json, write_trace_csv, StopReason, TraceRecord, VqeTrace, TRACE_HEADER,
};

/// How the cost is estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Shots { count: usize, seed: u64 },
}

/// Derived seed number `stream` of `seed`; used for per-run and per-call
/// randomness so that independent draws never share a generator.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Cost function `<ψ(θ)|H|ψ(θ)>` for a fixed circuit and Hamiltonian.
#[derive(Clone, Debug)]
pub struct Evaluator {
    circuit: ParamCircuit,
    hamiltonian: PauliSum<f64>,
    operator: CompiledOperator<f64>,
    mode: Mode,
    gauss_ops: Vec<GaussOperator>,
    charges: StaticCharges,
}

impl Evaluator {
    pub fn new(circuit: ParamCircuit, hamiltonian: PauliSum<f64>, mode: Mode) -> Result<Self> {
        if circuit.n_qubits() != hamiltonian.n_qubits() {
            return Err(Error::Dimension {
                expected: circuit.n_qubits(),
                got: hamiltonian.n_qubits(),
            });
        }
        if !hamiltonian.is_hermitian() {
            return Err(Error::NotHermitian("cost Hamiltonian".into()));
        }
        if let Mode::Shots { count: 0, .. } = mode {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        let operator = CompiledOperator::new(&hamiltonian)?;
        Ok(Self {
            circuit,
            hamiltonian,
            operator,
            mode,
            gauss_ops: Vec::new(),
            charges: StaticCharges::none(),
        })
    }

    /// Enables Gauss-law fidelity tracing against the sector `charges`.
    pub fn with_gauss(mut self, gauss_ops: Vec<GaussOperator>, charges: StaticCharges) -> Self {
        self.gauss_ops = gauss_ops;
        self.charges = charges;
        self
    }

    pub fn circuit(&self) -> &ParamCircuit {
        &self.circuit
    }

    pub fn hamiltonian(&self) -> &PauliSum<f64> {
        &self.hamiltonian
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        if let Mode::Shots { count: 0, .. } = mode {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        Ok(Self {
            mode,
            ..self.clone()
        })
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params()
    }

    /// Shots consumed by one cost evaluation (0 in exact mode).
    pub fn shots_per_cost(&self) -> usize {
        match self.mode {
            Mode::Exact => 0,
            Mode::Shots { count, .. } => count,
        }
    }

    /// `|ψ(θ)>` from `|0…0>`.
    pub fn state(&self, theta: &[f64]) -> Result<StateVector<f64>> {
        let mut psi = StateVector::zero(self.circuit.n_qubits())?;
        psi.apply_all(&self.circuit.bind(theta)?)?;
        Ok(psi)
    }

    pub fn energy_of(&self, psi: &StateVector<f64>) -> Result<f64> {
        self.operator.expectation(psi)
    }

    pub fn exact_energy(&self, theta: &[f64]) -> Result<f64> {
        self.energy_of(&self.state(theta)?)
    }

    /// Gauss fidelity of `psi`; `None` when no Gauss operators were given.
    pub fn fidelity_of(&self, psi: &StateVector<f64>) -> Result<Option<f64>> {
        if self.gauss_ops.is_empty() {
            return Ok(None);
        }
        gauss_fidelity(psi, &self.gauss_ops, &self.charges).map(Some)
    }

    /// The cost in the evaluator's mode; `stream` selects the sampling seed
    /// and is ignored in exact mode.
    pub fn cost_at(&self, theta: &[f64], stream: u64) -> Result<f64> {
        let psi = self.state(theta)?;
        self.cost_of_state(&psi, stream)
    }

    fn cost_of_state(&self, psi: &StateVector<f64>, stream: u64) -> Result<f64> {
        match self.mode {
            Mode::Exact => self.energy_of(psi),
            Mode::Shots { count, seed } => {
                sample_expectation(psi, &self.hamiltonian, count, derive_seed(seed, stream))
            }
        }
    }

    /// The cost with sampling stream 0.
    pub fn cost(&self, theta: &[f64]) -> Result<f64> {
        self.cost_at(theta, 0)
    }

    /// `∂C/∂θ_j = [C(θ + π/2 e_j) − C(θ − π/2 e_j)] / 2`, one component.
    /// In shot mode the two evaluations use streams `stream` and `stream + 1`.
    pub fn parameter_shift_component(&self, theta: &[f64], j: usize, stream: u64) -> Result<f64> {
        if j >= self.n_params() {
            return Err(Error::InvalidArgument(format!(
                "parameter {j} out of range ({} parameters)",
                self.n_params()
            )));
        }
        let gates = self.circuit.bind(theta)?;
        let n_prep = self.circuit.prep().len();
        let mut prefix = StateVector::zero(self.circuit.n_qubits())?;
        prefix.apply_all(&gates[..n_prep + j])?;
        let shifted = |delta: f64, s: u64| -> Result<f64> {
            let mut psi = prefix.clone();
            psi.apply(&self.circuit.param_gate(j, theta[j] + delta))?;
            psi.apply_all(&gates[n_prep + j + 1..])?;
            self.cost_of_state(&psi, s)
        };
        let half_pi = std::f64::consts::FRAC_PI_2;
        Ok(0.5 * (shifted(half_pi, stream)? - shifted(-half_pi, stream + 1)?))
    }

    /// Full parameter-shift gradient; streams `stream + 2j` and `stream + 2j + 1`
    /// feed component `j`.
    pub fn parameter_shift_grad(&self, theta: &[f64], stream: u64) -> Result<Vec<f64>> {
        let gates = self.circuit.bind(theta)?;
        let n_prep = self.circuit.prep().len();
        let mut prefix = StateVector::zero(self.circuit.n_qubits())?;
        prefix.apply_all(&gates[..n_prep])?;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut grad = Vec::with_capacity(theta.len());
        for j in 0..theta.len() {
            let mut pair = [0.0; 2];
            for (k, delta) in [half_pi, -half_pi].into_iter().enumerate() {
                let mut psi = prefix.clone();
                psi.apply(&self.circuit.param_gate(j, theta[j] + delta))?;
                psi.apply_all(&gates[n_prep + j + 1..])?;
                pair[k] = self.cost_of_state(&psi, stream + 2 * j as u64 + k as u64)?;
            }
            grad.push(0.5 * (pair[0] - pair[1]));
            prefix.apply(&gates[n_prep + j])?;
        }
        Ok(grad)
    }

    /// Exact energy and gradient by reverse-mode propagation through the
    /// circuit: `∂E/∂θ_j = Im <λ_j| P_j |φ_j>` with `φ_j` the state after
    /// gate `j` and `λ_j` the back-propagated `H|ψ>`.
    pub fn adjoint_gradient(&self, theta: &[f64]) -> Result<(f64, Vec<f64>, StateVector<f64>)> {
        let psi = self.state(theta)?;
        let mut lambda = self.operator.apply(&psi)?;
        let energy = psi
            .amplitudes()
            .iter()
            .zip(lambda.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re;
        let mut phi = psi.clone();
        let mut grad = vec![0.0; theta.len()];
        for j in (0..theta.len()).rev() {
            let generator = self.circuit.param_gates()[j].generator;
            grad[j] = phi.matrix_element(&lambda, &generator)?.im;
            let inverse: Gate<f64> = self.circuit.param_gate(j, -theta[j]);
            phi.apply(&inverse)?;
            lambda.apply(&inverse)?;
        }
        Ok((energy, grad, psi))
    }

    /// Energy and gradient in exact mode, using the adjoint method.
    pub fn value_and_grad(&self, theta: &[f64]) -> Result<(f64, Vec<f64>, StateVector<f64>)> {
        if self.mode != Mode::Exact {
            return Err(Error::InvalidArgument(
                "gradient descent needs exact mode".into(),
            ));
        }
        self.adjoint_gradient(theta)
    }
}

/// What SPSA needs from a cost function.
pub trait Objective {
    fn n_params(&self) -> usize;
    /// Possibly noisy cost; `stream` selects the noise realization.
    fn cost_at(&self, theta: &[f64], stream: u64) -> Result<f64>;
    /// Exact energy and Gauss fidelity recorded in traces.
    fn observe(&self, theta: &[f64]) -> Result<(f64, Option<f64>)>;
    fn shots_per_cost(&self) -> usize {
        0
    }
}

impl Objective for Evaluator {
    fn n_params(&self) -> usize {
        Evaluator::n_params(self)
    }

    fn cost_at(&self, theta: &[f64], stream: u64) -> Result<f64> {
        Evaluator::cost_at(self, theta, stream)
    }

    fn observe(&self, theta: &[f64]) -> Result<(f64, Option<f64>)> {
        let psi = self.state(theta)?;
        Ok((self.energy_of(&psi)?, self.fidelity_of(&psi)?))
    }

    fn shots_per_cost(&self) -> usize {
        Evaluator::shots_per_cost(self)
    }
}

/// A deterministic objective given by a plain function.
pub struct FnObjective<F> {
    pub n_params: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> Objective for FnObjective<F> {
    fn n_params(&self) -> usize {
        self.n_params
    }

    fn cost_at(&self, theta: &[f64], _stream: u64) -> Result<f64> {
        Ok((self.f)(theta))
    }

    fn observe(&self, theta: &[f64]) -> Result<(f64, Option<f64>)> {
        Ok(((self.f)(theta), None))
    }
}

/// Runs `n_runs` independent jobs concurrently; results come back in run order.
pub fn multi_start<T: Send>(
    n_runs: usize,
    job: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Vec<Result<T>> {
    (0..n_runs).into_par_iter().map(job).collect()
}
