//! Shot-sampled estimation and Gauss-law diagnostics.

use num_complex::Complex;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::StateVector;
use crate::error::{Error, Result};
use crate::hamiltonian::GaussOperator;
use crate::lattice::StaticCharges;
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::Real;

/// Greedy first-fit partition of the non-identity terms into qubit-wise
/// commuting groups. Returns term indices per group, in term order.
pub fn qwc_groups<T: Real>(obs: &PauliSum<T>) -> Vec<Vec<usize>> {
    let mut groups: Vec<(PauliString, Vec<usize>)> = Vec::new();
    for (i, (_, p)) in obs.terms().iter().enumerate() {
        if p.is_identity() {
            continue;
        }
        match groups
            .iter_mut()
            .find(|(basis, _)| basis.qubit_wise_commutes(p))
        {
            Some((basis, members)) => {
                let merged = PauliString::from_masks(
                    basis.n_qubits(),
                    basis.x_mask() | p.x_mask(),
                    basis.z_mask() | p.z_mask(),
                    crate::pauli::Phase::ONE,
                )
                .expect("same width");
                *basis = merged;
                members.push(i);
            }
            None => groups.push((p.with_phase(crate::pauli::Phase::ONE), vec![i])),
        }
    }
    groups.into_iter().map(|(_, m)| m).collect()
}

/// Shot-based estimate of `<ψ|obs|ψ>`.
///
/// Shots are split evenly across the qubit-wise commuting groups, remainder
/// to the earliest groups; every group receives at least one shot. Each group
/// is measured in its shared eigenbasis by sampling outcomes from the exact
/// probabilities. Identity terms contribute their coefficient exactly.
pub fn sample_expectation<T: Real>(
    state: &StateVector<T>,
    obs: &PauliSum<T>,
    shots: usize,
    seed: u64,
) -> Result<T> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    if obs.n_qubits() != state.n_qubits() {
        return Err(Error::Dimension {
            expected: state.n_qubits(),
            got: obs.n_qubits(),
        });
    }
    if !obs.is_hermitian() {
        return Err(Error::NotHermitian("observable".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = qwc_groups(obs);
    let mut estimate: f64 = obs
        .terms()
        .iter()
        .filter(|(_, p)| p.is_identity())
        .map(|(c, p)| c.to_f64_lossy() * p.phase().sign().unwrap() as f64)
        .sum();
    let per_group = shots / groups.len().max(1);
    let remainder = shots % groups.len().max(1);
    for (gi, members) in groups.iter().enumerate() {
        let group_shots = (per_group + usize::from(gi < remainder)).max(1);
        let mut rotated = state.clone();
        let (mut x_all, mut z_all) = (0u64, 0u64);
        for &i in members {
            let p = obs.terms()[i].1;
            x_all |= p.x_mask();
            z_all |= p.z_mask();
        }
        for q in 0..state.n_qubits() {
            let (xb, zb) = (x_all >> q & 1 == 1, z_all >> q & 1 == 1);
            match (xb, zb) {
                (true, false) => rotated.apply_hadamard(q)?,
                (true, true) => {
                    rotated.apply_sdg(q)?;
                    rotated.apply_hadamard(q)?;
                }
                _ => {}
            }
        }
        let probs: Vec<f64> = rotated
            .amplitudes()
            .iter()
            .map(|a| a.norm_sqr().to_f64_lossy())
            .collect();
        let dist = WeightedIndex::new(&probs)
            .map_err(|e| Error::InvalidArgument(format!("cannot sample state: {e}")))?;
        let mut totals = vec![0i64; members.len()];
        for _ in 0..group_shots {
            let outcome = dist.sample(&mut rng);
            for (t, &i) in totals.iter_mut().zip(members) {
                let support = obs.terms()[i].1.support() as usize;
                *t += if super::parity(outcome & support) {
                    -1
                } else {
                    1
                };
            }
        }
        for (t, &i) in totals.iter().zip(members) {
            let (c, p) = obs.terms()[i];
            let sign = p.phase().sign().unwrap() as f64;
            estimate += c.to_f64_lossy() * sign * (*t as f64) / group_shots as f64;
        }
    }
    Ok(T::of(estimate))
}

/// `<G_l>` per site, including the staggered sign.
pub fn gauss_expectations<T: Real>(
    state: &StateVector<T>,
    gauss_ops: &[GaussOperator],
) -> Result<Vec<T>> {
    gauss_ops
        .iter()
        .map(|g| {
            let v: Complex<T> = state.expectation_string(&g.signed())?;
            Ok(v.re)
        })
        .collect()
}

/// Site average of `<(I + q_l G_l)/2>`; equals 1 exactly on the sector `{q_l}`.
pub fn gauss_fidelity<T: Real>(
    state: &StateVector<T>,
    gauss_ops: &[GaussOperator],
    charges: &StaticCharges,
) -> Result<T> {
    if gauss_ops.is_empty() {
        return Err(Error::InvalidArgument("no Gauss operators given".into()));
    }
    let g = gauss_expectations(state, gauss_ops)?;
    let half = T::of(0.5);
    let total: T = g
        .iter()
        .zip(gauss_ops)
        .map(|(v, op)| half * (T::one() + T::of(charges.q(op.site) as f64) * *v))
        .sum();
    Ok(total / T::of(gauss_ops.len() as f64))
}

/// Site average of the raw `q_l <G_l>`.
pub fn mean_gauss_expectation<T: Real>(
    state: &StateVector<T>,
    gauss_ops: &[GaussOperator],
    charges: &StaticCharges,
) -> Result<T> {
    let g = gauss_expectations(state, gauss_ops)?;
    let total: T = g
        .iter()
        .zip(gauss_ops)
        .map(|(v, op)| T::of(charges.q(op.site) as f64) * *v)
        .sum();
    Ok(total / T::of(gauss_ops.len().max(1) as f64))
}

/// Sign of `<G_l>` per site; `None` where the expectation is not close to ±1.
pub fn detect_sector<T: Real>(
    state: &StateVector<T>,
    gauss_ops: &[GaussOperator],
    tol: T,
) -> Result<Vec<Option<i8>>> {
    Ok(gauss_expectations(state, gauss_ops)?
        .into_iter()
        .map(|v| {
            if (v - T::one()).abs() <= tol {
                Some(1)
            } else if (v + T::one()).abs() <= tol {
                Some(-1)
            } else {
                None
            }
        })
        .collect())
}
