//! Dense-matrix reference constructions shared by the integration tests.
//! Everything here is built from Kronecker products of 2x2 matrices and never
//! goes through the bit-mask code paths of the library.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use z2ladder::pauli::{Pauli, PauliString, PauliSum};

pub type M = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn single(p: Pauli) -> M {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => M::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => M::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => M::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => M::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Operator on `n` qubits given per-qubit factors; qubit k is bit k of the
/// basis index, so qubit 0 is the rightmost Kronecker factor.
pub fn kron_ops(n: usize, factor: impl Fn(usize) -> M) -> M {
    let mut acc = M::from_element(1, 1, c(1.0, 0.0));
    for q in (0..n).rev() {
        acc = acc.kronecker(&factor(q));
    }
    acc
}

pub fn dense_string(p: &PauliString) -> M {
    let phase = p.phase().to_complex::<f64>();
    kron_ops(p.n_qubits(), |q| single(p.get(q))) * phase
}

pub fn dense_sum(s: &PauliSum<f64>) -> M {
    let dim = 1 << s.n_qubits();
    let mut acc = M::zeros(dim, dim);
    for (coef, p) in s.terms() {
        acc += dense_string(p) * c(*coef, 0.0);
    }
    acc
}

pub fn identity(n: usize) -> M {
    M::identity(1 << n, 1 << n)
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &M) -> M {
    let norm: f64 = a.iter().map(|v| v.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil().max(0.0) as i32 + 4).max(0);
    let scaled = a / c(2f64.powi(squarings), 0.0);
    let n = a.nrows();
    let mut term = M::identity(n, n);
    let mut sum = M::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn column(m: &M, v: &[C]) -> Vec<C> {
    let x = nalgebra::DVector::from_column_slice(v);
    (m * x).iter().copied().collect()
}

/// Smallest eigenvalue of a hermitian matrix.
pub fn min_eigenvalue(m: &M) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    eig.eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
