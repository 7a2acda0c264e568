//! Experiment drivers: each takes an [`ExperimentConfig`], runs oracles and
//! VQE, and returns a serializable report. Writing reports to disk lives in
//! [`write_ground_state`] and its siblings.

mod config;
mod fidelity;
mod ground_state;
mod output;
mod string_breaking;
mod variance;

pub use config::{
    ExperimentConfig, ExperimentKind, InitKind, OptimizerKind, OracleSettings, ScanConfig,
    SpsaSettings, StringBreakingConfig, SweepConfig,
};
pub use fidelity::{fidelity_trace_experiment, FidelityRun, FidelityTraceReport};
pub use ground_state::{
    ground_state_experiment, ground_state_sweep, GroundStateReport, RunSummary, SweepReport,
    SweepRow,
};
pub use output::{
    write_atomic, write_fidelity_trace, write_ground_state, write_json, write_string_breaking,
    write_sweep, write_variance_scan,
};
pub use string_breaking::{string_breaking_scan, AverageRow, PotentialRow, StaticPotentialTable};
pub use variance::{gradient_variance, variance_scan, VarianceRow, VarianceScanReport};

use crate::ansatz::{build_circuit, AnsatzKind, ParamCircuit};
use crate::error::Result;
use crate::hamiltonian::{total_hamiltonian, HamiltonianBundle};
use crate::lattice::{LadderLattice, StaticCharges};
use crate::optimize::{derive_seed, gradient_minimize, spsa_minimize, Evaluator, VqeTrace};
use crate::oracle::{sector_ground, SpectrumResult};

/// Lattice, charges and Hamiltonian of one configuration.
pub(crate) struct Problem {
    pub lattice: LadderLattice,
    pub charges: StaticCharges,
    pub bundle: HamiltonianBundle<f64>,
}

impl Problem {
    pub fn new(config: &ExperimentConfig, plaquettes: usize) -> Result<Self> {
        let lattice = LadderLattice::build(plaquettes)?;
        let charges = config.static_charges(&lattice)?;
        Self::with_charges(config, lattice, charges)
    }

    pub fn with_charges(
        config: &ExperimentConfig,
        lattice: LadderLattice,
        charges: StaticCharges,
    ) -> Result<Self> {
        let bundle = total_hamiltonian(&lattice, &config.params()?, &charges)?;
        Ok(Self {
            lattice,
            charges,
            bundle,
        })
    }

    pub fn circuit(&self, kind: AnsatzKind, layers: usize) -> Result<ParamCircuit> {
        build_circuit(kind, &self.lattice, layers, &self.charges)
    }

    /// Exact evaluator with Gauss tracing in the problem's sector.
    pub fn evaluator(&self, circuit: ParamCircuit) -> Result<Evaluator> {
        Ok(Evaluator::new(
            circuit,
            self.bundle.h_total.clone(),
            crate::optimize::Mode::Exact,
        )?
        .with_gauss(self.bundle.gauss_ops.clone(), self.charges.clone()))
    }

    pub fn sector_oracle(
        &self,
        config: &ExperimentConfig,
        keep_state_max_qubits: usize,
    ) -> Result<SpectrumResult> {
        sector_ground(
            &self.bundle.h_total,
            &self.bundle.gauss_ops,
            &self.charges,
            &config.oracle.sector(keep_state_max_qubits),
        )
    }
}

/// One VQE run with seeds derived from `run_seed`: stream 0 draws the
/// starting point, 1 the shot noise, 2 the SPSA perturbations.
pub(crate) fn run_vqe(
    config: &ExperimentConfig,
    eval: &Evaluator,
    init: InitKind,
    run_seed: u64,
) -> Result<VqeTrace> {
    let theta0 = match init {
        InitKind::Random => eval.circuit().random_parameters(derive_seed(run_seed, 0)),
        InitKind::Default => eval.circuit().default_parameters(),
    };
    match config.optimizer {
        OptimizerKind::Gradient => gradient_minimize(eval, &theta0, &config.gradient),
        OptimizerKind::Spsa => {
            let eval = eval.with_mode(config.mode(derive_seed(run_seed, 1)))?;
            spsa_minimize(
                &eval,
                &theta0,
                &config.spsa.with_seed(derive_seed(run_seed, 2)),
            )
        }
    }
}

/// Mean and sample standard deviation; the deviation is 0 for fewer than two values.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// `(E − E₀)/|E₀|`.
pub fn relative_error(energy: f64, reference: f64) -> f64 {
    (energy - reference) / reference.abs()
}
