use rayon::prelude::*;
use serde::Serialize;

use super::{mean_std, ExperimentConfig, Problem};
use crate::ansatz::AnsatzKind;
use crate::error::{Error, Result};
use crate::lattice::{LadderLattice, StaticCharges};
use crate::optimize::{derive_seed, Evaluator};

#[derive(Clone, Debug, Serialize)]
pub struct VarianceRow {
    pub plaquettes: usize,
    pub layers: usize,
    pub ansatz: AnsatzKind,
    pub n_qubits: usize,
    pub n_params: usize,
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VarianceScanReport {
    pub all_parameters: bool,
    pub rows: Vec<VarianceRow>,
}

impl VarianceScanReport {
    pub fn cell(
        &self,
        plaquettes: usize,
        layers: usize,
        ansatz: AnsatzKind,
    ) -> Option<&VarianceRow> {
        self.rows
            .iter()
            .find(|r| r.plaquettes == plaquettes && r.layers == layers && r.ansatz == ansatz)
    }
}

/// Sample mean and variance (`n − 1` denominator) of a gradient component
/// over `samples` uniformly random parameter vectors. With `all_parameters`
/// the per-parameter means and variances are averaged over all parameters;
/// otherwise only the circuit's designated parameter is used. Derivatives
/// come from the parameter-shift rule, so shot mode works as well.
pub fn gradient_variance(
    eval: &Evaluator,
    samples: usize,
    seed: u64,
    all_parameters: bool,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let circuit = eval.circuit();
    let j = circuit.designated_param();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for s in 0..samples {
        let theta = circuit.random_parameters(derive_seed(seed, s as u64));
        let stream = (s as u64) << 32;
        let grad = if all_parameters {
            eval.parameter_shift_grad(&theta, stream)?
        } else {
            vec![eval.parameter_shift_component(&theta, j, stream)?]
        };
        if columns.is_empty() {
            columns = vec![Vec::with_capacity(samples); grad.len()];
        }
        for (col, g) in columns.iter_mut().zip(grad) {
            col.push(g);
        }
    }
    let k = columns.len() as f64;
    let (mut mean, mut variance) = (0.0, 0.0);
    for col in &columns {
        let (m, sd) = mean_std(col);
        mean += m / k;
        variance += sd * sd / k;
    }
    Ok((mean, variance))
}

/// Gradient variance on every `(plaquettes, layers, ansatz)` cell of the scan
/// grid, in the vacuum sector. Each cell draws from a seed derived from its
/// own coordinates, so the grid can be reshaped without changing any cell.
pub fn variance_scan(config: &ExperimentConfig) -> Result<VarianceScanReport> {
    config.validate()?;
    if !config.charges.is_empty() {
        return Err(Error::InvalidArgument(
            "the variance scan runs in the vacuum sector; leave \"charges\" empty".into(),
        ));
    }
    let scan = &config.scan;
    let mut cells = Vec::new();
    for &p in &scan.plaquettes {
        for &l in &scan.layers {
            for &a in &scan.ansatze {
                cells.push((p, l, a));
            }
        }
    }
    let rows: Vec<Result<VarianceRow>> = cells
        .par_iter()
        .map(|&(plaquettes, layers, ansatz)| {
            let lattice = LadderLattice::build(plaquettes)?;
            let problem = Problem::with_charges(config, lattice, StaticCharges::none())?;
            let circuit = problem.circuit(ansatz, layers)?;
            let eval = problem.evaluator(circuit)?;
            let cell_seed = derive_seed(
                config.seed,
                (plaquettes as u64) << 16 | (layers as u64) << 8 | ansatz as u64,
            );
            let eval = eval.with_mode(config.mode(derive_seed(cell_seed, u64::MAX)))?;
            let (mean, variance) =
                gradient_variance(&eval, scan.samples, cell_seed, scan.all_parameters)?;
            Ok(VarianceRow {
                plaquettes,
                layers,
                ansatz,
                n_qubits: eval.circuit().n_qubits(),
                n_params: eval.n_params(),
                samples: scan.samples,
                mean,
                variance,
            })
        })
        .collect();
    Ok(VarianceScanReport {
        all_parameters: scan.all_parameters,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}
