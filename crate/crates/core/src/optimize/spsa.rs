use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Objective, StopReason, TraceRecord, VqeTrace};
use crate::error::{Error, Result};

/// Gains `a_k = a/(k+1+A)^alpha` and `c_k = c/(k+1)^gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaConfig {
    /// Calibrated from the first gradient estimates when absent.
    pub a: Option<f64>,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant `A`; `0.1 · max_iter` when absent.
    pub stability: Option<f64>,
    pub max_iter: usize,
    /// Target size of each parameter's first step when calibrating `a`.
    pub first_step: f64,
    /// Perturbations averaged for the calibration.
    pub calibration_samples: usize,
    /// Fraction of the final iterates whose mean is returned as the result;
    /// 0 returns the last iterate.
    pub average_tail: f64,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            a: None,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            stability: None,
            max_iter: 300,
            first_step: 0.1,
            calibration_samples: 5,
            average_tail: 0.0,
            seed: 0,
        }
    }
}

fn rademacher(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

fn perturbed(theta: &[f64], delta: &[f64], step: f64) -> Vec<f64> {
    theta.iter().zip(delta).map(|(t, d)| t + step * d).collect()
}

/// One simultaneous-perturbation gradient estimate with perturbation `delta`
/// and size `ck`; returns the estimate and the two cost values.
pub fn spsa_gradient<O: Objective>(
    obj: &O,
    theta: &[f64],
    ck: f64,
    delta: &[f64],
    streams: (u64, u64),
) -> Result<(Vec<f64>, f64, f64)> {
    let plus = obj.cost_at(&perturbed(theta, delta, ck), streams.0)?;
    let minus = obj.cost_at(&perturbed(theta, delta, -ck), streams.1)?;
    let slope = (plus - minus) / (2.0 * ck);
    Ok((delta.iter().map(|d| slope * d).collect(), plus, minus))
}

/// Simultaneous-perturbation stochastic approximation. Each iteration costs
/// two cost evaluations; the exact energy of every iterate is recorded for
/// diagnostics. A non-finite cost ends the run with the trace so far.
pub fn spsa_minimize<O: Objective>(
    eval: &O,
    theta0: &[f64],
    config: &SpsaConfig,
) -> Result<VqeTrace> {
    if config.max_iter < 1 {
        return Err(Error::InvalidArgument("SPSA needs max_iter >= 1".into()));
    }
    if !(0.0..=1.0).contains(&config.average_tail) {
        return Err(Error::InvalidArgument(
            "average_tail must lie in [0, 1]".into(),
        ));
    }
    if theta0.len() != eval.n_params() {
        return Err(Error::Dimension {
            expected: eval.n_params(),
            got: theta0.len(),
        });
    }
    let n = theta0.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stream = 0u64;
    let mut shots = 0usize;
    let per_cost = eval.shots_per_cost();
    let mut streams = |shots: &mut usize| {
        stream += 2;
        *shots += 2 * per_cost;
        (stream - 1, stream)
    };
    let big_a = config.stability.unwrap_or(0.1 * config.max_iter as f64);

    let a = match config.a {
        Some(a) => a,
        None => {
            let mut total = 0.0;
            let samples = config.calibration_samples.max(1);
            for _ in 0..samples {
                let delta = rademacher(&mut rng, n);
                let (_, plus, minus) =
                    spsa_gradient(eval, theta0, config.c, &delta, streams(&mut shots))?;
                total += (plus - minus).abs() / (2.0 * config.c);
            }
            let magnitude = total / samples as f64;
            if magnitude > 0.0 && magnitude.is_finite() {
                config.first_step * (1.0 + big_a).powf(config.alpha) / magnitude
            } else {
                config.first_step
            }
        }
    };

    let mut trace = VqeTrace::new();
    let mut theta = theta0.to_vec();
    let record = |iteration, cost_value, theta: &[f64], shots| -> Result<TraceRecord> {
        let (energy, gauss_fidelity) = eval.observe(theta)?;
        Ok(TraceRecord {
            iteration,
            energy,
            cost: cost_value,
            gauss_fidelity,
            shots,
            theta: theta.to_vec(),
        })
    };
    trace.push(record(0, f64::NAN, &theta, shots)?);

    for k in 0..config.max_iter {
        let ck = config.c / ((k + 1) as f64).powf(config.gamma);
        let ak = a / ((k + 1) as f64 + big_a).powf(config.alpha);
        let delta = rademacher(&mut rng, n);
        let (grad, plus, minus) = spsa_gradient(eval, &theta, ck, &delta, streams(&mut shots))?;
        if !plus.is_finite() || !minus.is_finite() {
            return Ok(trace.finish(StopReason::NonFinite, false));
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= ak * g;
        }
        trace.push(record(k + 1, 0.5 * (plus + minus), &theta, shots)?);
    }
    let mut trace = trace.finish(StopReason::MaxIter, true);
    if config.average_tail > 0.0 {
        let count = ((config.average_tail * trace.records.len() as f64).ceil() as usize).max(1);
        let tail = &trace.records[trace.records.len() - count..];
        let mut mean = vec![0.0; n];
        for r in tail {
            for (m, t) in mean.iter_mut().zip(&r.theta) {
                *m += t / count as f64;
            }
        }
        let (energy, fidelity) = eval.observe(&mean)?;
        trace.final_theta = mean;
        trace.final_energy = energy;
        trace.final_fidelity = fidelity;
        trace.best_energy = trace.best_energy.min(energy);
    }
    Ok(trace)
}
