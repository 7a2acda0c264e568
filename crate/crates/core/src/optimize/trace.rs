use std::io::Write;

use serde::Serialize;
use serde_json::json;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientTol,
    StepTol,
    MaxIter,
    LineSearchFailed,
    NonFinite,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Exact energy of the current parameters.
    pub energy: f64,
    /// Value the optimizer stepped on (sampled in shot mode).
    pub cost: f64,
    pub gauss_fidelity: Option<f64>,
    /// Shots consumed so far.
    pub shots: usize,
    pub theta: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VqeTrace {
    pub records: Vec<TraceRecord>,
    pub final_theta: Vec<f64>,
    pub final_energy: f64,
    pub final_fidelity: Option<f64>,
    /// Lowest exact energy seen at any recorded iterate.
    pub best_energy: f64,
    pub converged: bool,
    pub stop: StopReason,
}

impl VqeTrace {
    pub(super) fn new() -> Self {
        Self {
            records: Vec::new(),
            final_theta: Vec::new(),
            final_energy: f64::NAN,
            final_fidelity: None,
            best_energy: f64::INFINITY,
            converged: false,
            stop: StopReason::MaxIter,
        }
    }

    pub(super) fn push(&mut self, record: TraceRecord) {
        debug_assert!(self
            .records
            .last()
            .is_none_or(|r| r.iteration < record.iteration));
        self.best_energy = self.best_energy.min(record.energy);
        self.records.push(record);
    }

    pub(super) fn finish(mut self, stop: StopReason, converged: bool) -> Self {
        if let Some(last) = self.records.last() {
            self.final_theta = last.theta.clone();
            self.final_energy = last.energy;
            self.final_fidelity = last.gauss_fidelity;
        }
        self.stop = stop;
        self.converged = converged;
        self
    }

    /// Energies of the iterates (exact mode values).
    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }
}

pub const TRACE_HEADER: [&str; 5] = ["run_id", "iteration", "energy", "gauss_fidelity", "shots"];

/// One row per record of every run; fidelity is empty when not traced.
pub fn write_trace_csv<W: Write>(out: W, runs: &[(usize, &VqeTrace)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for (run_id, trace) in runs {
        for r in &trace.records {
            w.write_record([
                run_id.to_string(),
                r.iteration.to_string(),
                r.energy.to_string(),
                r.gauss_fidelity.map(|f| f.to_string()).unwrap_or_default(),
                r.shots.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parameter snapshots, `{"runs": [{"run_id", "theta": [[…], …]}]}`.
pub fn write_theta_json<W: Write>(out: W, runs: &[(usize, &VqeTrace)]) -> Result<()> {
    let runs: Vec<_> = runs
        .iter()
        .map(|(id, t)| {
            let snapshots: Vec<&Vec<f64>> = t.records.iter().map(|r| &r.theta).collect();
            json!({"run_id": id, "theta": snapshots})
        })
        .collect();
    serde_json::to_writer(out, &json!({ "runs": runs }))?;
    Ok(())
}
