use serde::Serialize;

use super::{relative_error, run_vqe, ExperimentConfig, InitKind, Problem};
use crate::ansatz::AnsatzKind;
use crate::error::Result;
use crate::optimize::{derive_seed, multi_start, VqeTrace};

#[derive(Clone, Debug, Serialize)]
pub struct FidelityRun {
    pub run_id: usize,
    pub label: &'static str,
    pub ansatz: AnsatzKind,
    pub init: InitKind,
    pub final_energy: f64,
    pub relative_error: f64,
    pub initial_fidelity: Option<f64>,
    pub final_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FidelityTraceReport {
    pub plaquettes: usize,
    pub layers: usize,
    pub sector_energy: f64,
    pub runs: Vec<FidelityRun>,
    #[serde(skip)]
    pub traces: Vec<(usize, VqeTrace)>,
}

impl FidelityTraceReport {
    pub fn trace_refs(&self) -> Vec<(usize, &VqeTrace)> {
        self.traces.iter().map(|(id, t)| (*id, t)).collect()
    }
}

const RUNS: [(&str, AnsatzKind, InitKind); 3] = [
    ("zz_pi", AnsatzKind::Zz, InitKind::Default),
    ("zz_random", AnsatzKind::Zz, InitKind::Random),
    ("gi_random", AnsatzKind::Gi, InitKind::Random),
];

/// Gauss fidelity along three optimizations in the configured sector: ZZ
/// from its all-π point, ZZ from a random point, and GI from a random point
/// as a control. The `ansatz` and `init` settings are ignored.
pub fn fidelity_trace_experiment(config: &ExperimentConfig) -> Result<FidelityTraceReport> {
    config.validate()?;
    let problem = Problem::new(config, config.plaquettes)?;
    let sector = problem.sector_oracle(config, 0)?;
    let traces = multi_start(RUNS.len(), |run_id| {
        let (_, ansatz, init) = RUNS[run_id];
        let eval = problem.evaluator(problem.circuit(ansatz, config.layers)?)?;
        run_vqe(config, &eval, init, derive_seed(config.seed, run_id as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let runs = traces
        .iter()
        .enumerate()
        .map(|(run_id, t)| {
            let (label, ansatz, init) = RUNS[run_id];
            FidelityRun {
                run_id,
                label,
                ansatz,
                init,
                final_energy: t.final_energy,
                relative_error: relative_error(t.final_energy, sector.ground_energy),
                initial_fidelity: t.records.first().and_then(|r| r.gauss_fidelity),
                final_fidelity: t.final_fidelity,
                min_fidelity: t
                    .records
                    .iter()
                    .filter_map(|r| r.gauss_fidelity)
                    .reduce(f64::min),
                iterations: t.records.len().saturating_sub(1),
            }
        })
        .collect();
    Ok(FidelityTraceReport {
        plaquettes: config.plaquettes,
        layers: config.layers,
        sector_energy: sector.ground_energy,
        runs,
        traces: traces.into_iter().enumerate().collect(),
    })
}
