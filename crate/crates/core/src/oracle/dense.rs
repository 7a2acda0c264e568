use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{Method, SpectrumResult};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::{CompiledOperator, StateVector};

pub const DENSE_MAX_QUBITS: usize = 14;

/// Materializes `h` as a dense matrix (row = output basis index).
pub fn dense_matrix(h: &PauliSum<f64>) -> Result<DMatrix<Complex64>> {
    let n = h.n_qubits();
    if n > DENSE_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "dense oracle qubits",
            requested: n,
            limit: DENSE_MAX_QUBITS,
        });
    }
    let dim = 1usize << n;
    let op = CompiledOperator::new(h)?;
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![Complex64::default(); dim];
    let mut col = vec![Complex64::default(); dim];
    for b in 0..dim {
        e[b] = Complex64::new(1.0, 0.0);
        op.apply_into(&e, &mut col)?;
        e[b] = Complex64::default();
        m.set_column(b, &nalgebra::DVector::from_column_slice(&col));
    }
    Ok(m)
}

/// Minimum eigenpair of `h` by full hermitian eigendecomposition.
pub fn dense_ground(h: &PauliSum<f64>) -> Result<SpectrumResult> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian("dense oracle input".into()));
    }
    let m = dense_matrix(h)?;
    let (energy, vector) = min_eigenpair(m);
    let state = StateVector::from_amplitudes(h.n_qubits(), vector)?;
    let residual = residual(h, &state, energy)?;
    Ok(SpectrumResult {
        ground_energy: energy,
        ground_state: Some(state),
        residual,
        method: Method::Dense,
        work: 1 << h.n_qubits(),
    })
}

pub(super) fn min_eigenpair(m: DMatrix<Complex64>) -> (f64, Vec<Complex64>) {
    let eig = SymmetricEigen::new(m);
    let (k, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty matrix");
    (energy, eig.eigenvectors.column(k).iter().copied().collect())
}

pub(super) fn residual(h: &PauliSum<f64>, state: &StateVector<f64>, energy: f64) -> Result<f64> {
    let hv = CompiledOperator::new(h)?.apply(state)?;
    Ok(hv
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(a, b)| (a - b * energy).norm_sqr())
        .sum::<f64>()
        .sqrt())
}
