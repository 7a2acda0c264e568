use serde::{Deserialize, Serialize};

use super::{Evaluator, StopReason, TraceRecord, VqeTrace};
use crate::error::{Error, Result};
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradientConfig {
    pub max_iter: usize,
    /// Stop when the largest gradient component falls below this.
    pub grad_tol: f64,
    /// Stop when the largest parameter change falls below this.
    pub step_tol: f64,
}

impl Default for GradientConfig {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: 1e-7,
            step_tol: 1e-10,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// BFGS on the inverse Hessian with Armijo backtracking, driven by exact
/// adjoint gradients. Every recorded iterate lowers the energy.
pub fn gradient_minimize(
    eval: &Evaluator,
    theta0: &[f64],
    config: &GradientConfig,
) -> Result<VqeTrace> {
    if theta0.len() != eval.n_params() {
        return Err(Error::Dimension {
            expected: eval.n_params(),
            got: theta0.len(),
        });
    }
    let n = theta0.len();
    let mut trace = VqeTrace::new();
    let mut x = theta0.to_vec();
    let (mut f, mut g, psi) = eval.value_and_grad(&x)?;
    if !f.is_finite() {
        return Err(Error::NonFinite { iteration: 0 });
    }
    let record = |iteration: usize,
                  energy: f64,
                  theta: &[f64],
                  psi: &StateVector<f64>|
     -> Result<TraceRecord> {
        Ok(TraceRecord {
            iteration,
            energy,
            cost: energy,
            gauss_fidelity: eval.fidelity_of(psi)?,
            shots: 0,
            theta: theta.to_vec(),
        })
    };
    trace.push(record(0, f, &x, &psi)?);

    // Inverse Hessian approximation, row-major.
    let mut h = vec![0.0; n * n];
    let reset = |h: &mut Vec<f64>, scale: f64| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = scale;
        }
    };
    reset(&mut h, 1.0);
    let mut first_update = true;

    for iteration in 1..=config.max_iter {
        if max_abs(&g) < config.grad_tol {
            return Ok(trace.finish(StopReason::GradientTol, true));
        }
        let mut p: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &p);
        if !(slope < 0.0) {
            reset(&mut h, 1.0);
            p = g.iter().map(|v| -v).collect();
            slope = dot(&g, &p);
        }
        // Angles are periodic; longer moves than π per component are never needed.
        let longest = max_abs(&p);
        if longest > std::f64::consts::PI {
            let shrink = std::f64::consts::PI / longest;
            p.iter_mut().for_each(|v| *v *= shrink);
            slope *= shrink;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let ft = eval.exact_energy(&trial)?;
            if ft.is_finite() && ft <= f + 1e-4 * alpha * slope {
                accepted = Some(trial);
                break;
            }
            alpha *= 0.5;
        }
        let Some(x_new) = accepted else {
            return Ok(trace.finish(StopReason::LineSearchFailed, false));
        };
        let (f_new, g_new, psi) = eval.value_and_grad(&x_new)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if first_update {
                reset(&mut h, sy / dot(&y, &y));
                first_update = false;
            }
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(record(iteration, f, &x, &psi)?);
        if max_abs(&s) < config.step_tol {
            return Ok(trace.finish(StopReason::StepTol, true));
        }
    }
    let converged = max_abs(&g) < config.grad_tol;
    let stop = if converged {
        StopReason::GradientTol
    } else {
        StopReason::MaxIter
    };
    Ok(trace.finish(stop, converged))
}
