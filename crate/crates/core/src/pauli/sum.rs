use std::collections::BTreeMap;

use num_complex::Complex;

use super::string::{PauliString, Phase};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coefficients at or below this magnitude are dropped by [`PauliSum::simplify`].
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Real-coefficient linear combination of Pauli strings.
///
/// Complex operators (ladder operators, anticommutators) are still
/// representable because each string carries its own phase; a simplified sum
/// keeps only phases `+1` and `+i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T> {
    n_qubits: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Real> PauliSum<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<(T, PauliString)>) -> Result<Self> {
        let mut sum = Self::new(n_qubits);
        for (c, s) in terms {
            sum.push(c, s)?;
        }
        Ok(sum)
    }

    /// `c · I`.
    pub fn constant(n_qubits: usize, c: T) -> Result<Self> {
        Self::from_terms(n_qubits, vec![(c, PauliString::identity(n_qubits)?)])
    }

    pub fn push(&mut self, coeff: T, string: PauliString) -> Result<()> {
        if string.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: string.n_qubits(),
            });
        }
        self.terms.push((coeff, string));
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merge duplicate strings, drop coefficients with `|c| <= drop_tol` and
    /// sort terms by (z-mask, x-mask).
    pub fn simplify(&self, drop_tol: T) -> Self {
        let mut acc: BTreeMap<(u64, u64), Complex<T>> = BTreeMap::new();
        for (c, s) in &self.terms {
            let v = s.phase().to_complex::<T>() * *c;
            *acc.entry(s.sort_key()).or_default() += v;
        }
        let mut terms = Vec::with_capacity(acc.len());
        for ((z, x), v) in acc {
            let base = PauliString::from_masks(self.n_qubits, x, z, Phase::ONE)
                .expect("masks come from strings of this width");
            if v.re.abs() > drop_tol {
                terms.push((v.re, base));
            }
            if v.im.abs() > drop_tol {
                terms.push((v.im, base.with_phase(Phase::I)));
            }
        }
        Self {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    pub fn simplified(&self) -> Self {
        self.simplify(T::of(DEFAULT_DROP_TOL))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(Self {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplified())
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|&(c, s)| (c * factor, s)).collect(),
        }
    }

    /// Operator product, simplified.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (a, sa) in &self.terms {
            for (b, sb) in &other.terms {
                terms.push((*a * *b, sa.mul(sb)?));
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplified())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|&(c, s)| (c, s.adjoint())).collect(),
        }
    }

    /// Anticommutator `{self, other}`, simplified.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    /// All phases real, so the (real-coefficient) sum is hermitian.
    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.is_hermitian())
    }

    /// Coefficient of the identity string (after summing duplicates).
    pub fn identity_coefficient(&self) -> T {
        self.terms
            .iter()
            .filter(|(_, s)| s.is_identity() && s.is_hermitian())
            .map(|(c, s)| *c * T::of(s.phase().sign().unwrap_or(1) as f64))
            .sum()
    }

    /// `Σ |c_k|`, an upper bound on the spectral radius.
    pub fn l1_norm(&self) -> T {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Converts coefficients to another scalar type.
    pub fn cast<U: Real>(&self) -> PauliSum<U> {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|&(c, s)| (U::of(c.to_f64_lossy()), s))
                .collect(),
        }
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(())
    }
}
