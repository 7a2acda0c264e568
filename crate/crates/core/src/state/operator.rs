use num_complex::Complex;

use super::{parity, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{PauliSum, Phase};
use crate::scalar::Real;

/// Terms sharing one x-mask, as `(z-mask, coefficient)` pairs.
type Bucket<T> = (usize, Vec<(usize, Complex<T>)>);

/// A [`PauliSum`] regrouped for repeated matrix-vector products.
///
/// Diagonal terms are folded into one precomputed vector; the remaining terms
/// are bucketed by x-mask so each bucket costs one pass over the amplitudes.
#[derive(Clone, Debug)]
pub struct CompiledOperator<T> {
    n_qubits: usize,
    diagonal: Vec<Complex<T>>,
    groups: Vec<Bucket<T>>,
    hermitian: bool,
    l1: T,
}

impl<T: Real> CompiledOperator<T> {
    pub fn new(sum: &PauliSum<T>) -> Result<Self> {
        let n = sum.n_qubits();
        if n > super::MAX_STATE_QUBITS {
            return Err(Error::Capacity {
                what: "operator qubits",
                requested: n,
                limit: super::MAX_STATE_QUBITS,
            });
        }
        let mut diag_terms = Vec::new();
        let mut groups: Vec<Bucket<T>> = Vec::new();
        for (c, p) in sum.terms() {
            let coeff = Phase::from_exponent(p.xz_exponent()).to_complex::<T>() * *c;
            let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
            if x == 0 {
                diag_terms.push((z, coeff));
            } else if let Some(g) = groups.iter_mut().find(|g| g.0 == x) {
                g.1.push((z, coeff));
            } else {
                groups.push((x, vec![(z, coeff)]));
            }
        }
        let dim = 1usize << n;
        let diagonal = if diag_terms.is_empty() {
            Vec::new()
        } else {
            (0..dim)
                .map(|b| {
                    diag_terms.iter().fold(Complex::default(), |acc, &(z, c)| {
                        if parity(b & z) {
                            acc - c
                        } else {
                            acc + c
                        }
                    })
                })
                .collect()
        };
        Ok(Self {
            n_qubits: n,
            diagonal,
            groups,
            hermitian: sum.is_hermitian(),
            l1: sum.l1_norm(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != 1 << self.n_qubits {
            return Err(Error::Dimension {
                expected: 1 << self.n_qubits,
                got: len,
            });
        }
        Ok(())
    }

    /// `out = H · input`.
    pub fn apply_into(&self, input: &[Complex<T>], out: &mut [Complex<T>]) -> Result<()> {
        self.check_len(input.len())?;
        self.check_len(out.len())?;
        if self.diagonal.is_empty() {
            out.iter_mut().for_each(|o| *o = Complex::default());
        } else {
            for ((o, d), a) in out.iter_mut().zip(&self.diagonal).zip(input) {
                *o = d * a;
            }
        }
        for (x, terms) in &self.groups {
            for (b, a) in input.iter().enumerate() {
                let mut coef: Complex<T> = Complex::default();
                for &(z, c) in terms {
                    coef = if parity(b & z) { coef - c } else { coef + c };
                }
                out[b ^ x] += coef * a;
            }
        }
        Ok(())
    }

    pub fn apply(&self, state: &StateVector<T>) -> Result<StateVector<T>> {
        let mut out = vec![Complex::default(); state.dim()];
        self.apply_into(state.amplitudes(), &mut out)?;
        StateVector::from_amplitudes(state.n_qubits(), out)
    }

    /// `<ψ|H|ψ>` as a complex number.
    pub fn expectation_complex(&self, psi: &[Complex<T>]) -> Result<Complex<T>> {
        self.check_len(psi.len())?;
        let mut acc: Complex<T> = Complex::default();
        if !self.diagonal.is_empty() {
            for (d, a) in self.diagonal.iter().zip(psi) {
                acc += d * a.norm_sqr();
            }
        }
        for (x, terms) in &self.groups {
            for (b, a) in psi.iter().enumerate() {
                let mut coef: Complex<T> = Complex::default();
                for &(z, c) in terms {
                    coef = if parity(b & z) { coef - c } else { coef + c };
                }
                acc += psi[b ^ x].conj() * coef * a;
            }
        }
        Ok(acc)
    }

    /// Real expectation value; fails on a non-hermitian operator.
    pub fn expectation(&self, state: &StateVector<T>) -> Result<T> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: state.n_qubits(),
            });
        }
        if !self.hermitian {
            return Err(Error::NotHermitian("observable".into()));
        }
        let v = self.expectation_complex(state.amplitudes())?;
        super::check_imaginary_residue(v.im, self.l1)?;
        Ok(v.re)
    }
}
