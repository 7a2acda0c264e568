//! Dense statevector simulator.
//!
//! Amplitude `b` is the coefficient of the computational basis state whose
//! bit `k` is the value of qubit `k`.

mod measure;
mod operator;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::scalar::Real;

pub use measure::{
    detect_sector, gauss_expectations, gauss_fidelity, mean_gauss_expectation, qwc_groups,
    sample_expectation,
};
pub use operator::CompiledOperator;

/// Largest register the simulator will allocate (2^26 amplitudes).
pub const MAX_STATE_QUBITS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate<T> {
    H(usize),
    X(usize),
    Rx(usize, T),
    Rz(usize, T),
    /// `exp(-i angle/2 · generator)` for a hermitian Pauli generator.
    PauliRot {
        generator: PauliString,
        angle: T,
    },
}

impl<T: Real> Gate<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Rx(..) => "RX",
            Gate::Rz(..) => "RZ",
            Gate::PauliRot { .. } => "PAULI_ROT",
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Rx(q, _) | Gate::Rz(q, _) => vec![*q],
            Gate::PauliRot { generator, .. } => (0..generator.n_qubits())
                .filter(|&q| generator.support() >> q & 1 == 1)
                .collect(),
        }
    }

    pub fn angle(&self) -> Option<T> {
        match self {
            Gate::Rx(_, a) | Gate::Rz(_, a) | Gate::PauliRot { angle: a, .. } => Some(*a),
            _ => None,
        }
    }

    /// The same gate with the angle negated (rotations) or itself (H, X).
    pub fn inverse(&self) -> Self {
        match self {
            Gate::Rx(q, a) => Gate::Rx(*q, -*a),
            Gate::Rz(q, a) => Gate::Rz(*q, -*a),
            Gate::PauliRot { generator, angle } => Gate::PauliRot {
                generator: *generator,
                angle: -*angle,
            },
            other => other.clone(),
        }
    }
}

#[inline]
pub(crate) fn parity(x: usize) -> bool {
    x.count_ones() & 1 == 1
}

/// Visits every pair `(b, b ^ x)` once, with `b < b ^ x`. `x` must be nonzero.
#[inline]
pub(crate) fn for_each_pair(dim: usize, x: usize, mut f: impl FnMut(usize, usize)) {
    let high = 1usize << (usize::BITS - 1 - x.leading_zeros());
    let block = high << 1;
    let mut base = 0;
    while base < dim {
        for b in base..base + high {
            f(b, b ^ x);
        }
        base += block;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    fn check_width(n_qubits: usize) -> Result<()> {
        if n_qubits > MAX_STATE_QUBITS {
            return Err(Error::Capacity {
                what: "statevector qubits",
                requested: n_qubits,
                limit: MAX_STATE_QUBITS,
            });
        }
        Ok(())
    }

    /// `|0…0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Self::check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Dimension {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![Complex::default(); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        Self::check_width(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::Dimension {
                expected: 1 << n_qubits,
                got: amps.len(),
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::zero() {
            let inv = T::one() / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::default(), |acc, v| acc + v))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn check_string(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: p.n_qubits(),
            });
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        match gate {
            Gate::H(q) => self.apply_hadamard(*q),
            Gate::X(q) => {
                self.check_qubit(*q)?;
                let x = 1usize << q;
                for_each_pair(self.dim(), x, |b, b2| self.amps.swap(b, b2));
                Ok(())
            }
            Gate::Rx(q, a) => {
                self.check_qubit(*q)?;
                self.apply_pauli_rotation(&PauliString::x_product(self.n_qubits, 1 << q)?, *a)
            }
            Gate::Rz(q, a) => {
                self.check_qubit(*q)?;
                self.apply_pauli_rotation(&PauliString::z_product(self.n_qubits, 1 << q)?, *a)
            }
            Gate::PauliRot { generator, angle } => self.apply_pauli_rotation(generator, *angle),
        }
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate<T>>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let s = T::FRAC_1_SQRT_2();
        let amps = &mut self.amps;
        for_each_pair(amps.len(), 1 << q, |b0, b1| {
            let (a0, a1) = (amps[b0], amps[b1]);
            amps[b0] = (a0 + a1) * s;
            amps[b1] = (a0 - a1) * s;
        });
        Ok(())
    }

    /// `S† = diag(1, -i)` on qubit `q`.
    pub fn apply_sdg(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let amps = &mut self.amps;
        for_each_pair(amps.len(), 1 << q, |_, b1| {
            let a = amps[b1];
            amps[b1] = Complex::new(a.im, -a.re);
        });
        Ok(())
    }

    /// Replaces the state by `P|ψ>`.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_string(p)?;
        let c = crate::pauli::Phase::from_exponent(p.xz_exponent()).to_complex::<T>();
        let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
        let amps = &mut self.amps;
        if x == 0 {
            for (b, a) in amps.iter_mut().enumerate() {
                *a = if parity(b & z) { -c * *a } else { c * *a };
            }
            return Ok(());
        }
        for_each_pair(amps.len(), x, |b, b2| {
            let (a, a2) = (amps[b], amps[b2]);
            amps[b2] = if parity(b & z) { -c * a } else { c * a };
            amps[b] = if parity(b2 & z) { -c * a2 } else { c * a2 };
        });
        Ok(())
    }

    /// Applies `exp(-i θ/2 P) = cos(θ/2) - i sin(θ/2) P` without building a matrix.
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, theta: T) -> Result<()> {
        self.check_string(p)?;
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(format!("rotation generator {p}")));
        }
        let half = theta * T::of(0.5);
        let (cos, sin) = (half.cos(), half.sin());
        // -i sin · c, with c the X^x Z^z prefactor of P.
        let c = crate::pauli::Phase::from_exponent(p.xz_exponent()).to_complex::<T>();
        let k = Complex::new(T::zero(), -sin) * c;
        let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
        let amps = &mut self.amps;
        if x == 0 {
            let plus = Complex::new(cos, T::zero()) + k;
            let minus = Complex::new(cos, T::zero()) - k;
            for (b, a) in amps.iter_mut().enumerate() {
                *a *= if parity(b & z) { minus } else { plus };
            }
            return Ok(());
        }
        for_each_pair(amps.len(), x, |b, b2| {
            let (a, a2) = (amps[b], amps[b2]);
            let pa2 = if parity(b2 & z) { -a2 } else { a2 };
            let pa = if parity(b & z) { -a } else { a };
            amps[b] = a * cos + k * pa2;
            amps[b2] = a2 * cos + k * pa;
        });
        Ok(())
    }

    /// `<bra| P |self>`.
    pub fn matrix_element(&self, bra: &Self, p: &PauliString) -> Result<Complex<T>> {
        self.check_same(bra)?;
        self.check_string(p)?;
        let c = crate::pauli::Phase::from_exponent(p.xz_exponent()).to_complex::<T>();
        let (x, z) = (p.x_mask() as usize, p.z_mask() as usize);
        let mut acc: Complex<T> = Complex::default();
        for (b, a) in self.amps.iter().enumerate() {
            let v = bra.amps[b ^ x].conj() * a;
            acc = if parity(b & z) { acc - v } else { acc + v };
        }
        Ok(acc * c)
    }

    /// `<ψ| P |ψ>`.
    pub fn expectation_string(&self, p: &PauliString) -> Result<Complex<T>> {
        self.matrix_element(self, p)
    }

    /// `Σ_k c_k <ψ|P_k|ψ>`, evaluated term by term.
    pub fn expectation(&self, obs: &crate::pauli::PauliSum<T>) -> Result<T> {
        if obs.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: obs.n_qubits(),
            });
        }
        if !obs.is_hermitian() {
            return Err(Error::NotHermitian("observable".into()));
        }
        let mut re = T::zero();
        let mut im = T::zero();
        for (c, p) in obs.terms() {
            let v = self.expectation_string(p)?;
            re += *c * v.re;
            im += *c * v.im;
        }
        check_imaginary_residue(im, obs.l1_norm())?;
        Ok(re)
    }
}

pub(crate) fn check_imaginary_residue<T: Real>(im: T, scale: T) -> Result<()> {
    let tol = T::of(1e-10).max(T::epsilon() * T::of(1e4)) * (T::one() + scale);
    if im.abs() > tol {
        return Err(Error::NotHermitian(format!(
            "imaginary expectation residue {im}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Pauli, PauliSum};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: Complex<f64>, b: Complex<f64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::<f64>::zero(1).unwrap();
        s.apply(&Gate::H(0)).unwrap();
        assert!(close(s.amplitudes()[0], Complex::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(s.amplitudes()[1], Complex::new(FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn rz_on_plus() {
        let mut s = StateVector::<f64>::zero(1).unwrap();
        s.apply(&Gate::H(0)).unwrap();
        s.apply(&Gate::Rz(0, PI / 2.0)).unwrap();
        let e = |phi: f64| Complex::from_polar(FRAC_1_SQRT_2, phi);
        assert!(close(s.amplitudes()[0], e(-PI / 4.0)));
        assert!(close(s.amplitudes()[1], e(PI / 4.0)));
    }

    #[test]
    fn x_gate_and_bad_targets() {
        let mut s = StateVector::<f64>::zero(3).unwrap();
        s.apply(&Gate::X(1)).unwrap();
        assert!(close(s.amplitudes()[2], Complex::new(1.0, 0.0)));
        assert!(s.apply(&Gate::X(3)).is_err());
        assert!(s.apply(&Gate::Rx(7, 0.1)).is_err());
        let wrong = PauliString::single(4, 0, Pauli::X).unwrap();
        assert!(s
            .apply(&Gate::PauliRot {
                generator: wrong,
                angle: 0.3
            })
            .is_err());
        let nonherm = PauliString::single(3, 0, Pauli::X)
            .unwrap()
            .with_phase(crate::pauli::Phase::I);
        assert!(s.apply_pauli_rotation(&nonherm, 0.3).is_err());
    }

    #[test]
    fn simple_expectations() {
        let s = StateVector::<f64>::zero(2).unwrap();
        let z0 = PauliSum::from_terms(2, vec![(1.0, PauliString::single(2, 0, Pauli::Z).unwrap())])
            .unwrap();
        assert_eq!(s.expectation(&z0).unwrap(), 1.0);
        let mut plus = StateVector::<f64>::zero(1).unwrap();
        plus.apply(&Gate::H(0)).unwrap();
        let x = PauliSum::from_terms(1, vec![(1.0, PauliString::single(1, 0, Pauli::X).unwrap())])
            .unwrap();
        assert!((plus.expectation(&x).unwrap() - 1.0).abs() < 1e-14);
        assert!(s.expectation(&x).is_err());
    }

    #[test]
    fn single_precision_state() {
        let mut s = StateVector::<f32>::zero(2).unwrap();
        s.apply(&Gate::Rx(0, 1.0f32)).unwrap();
        let z = PauliSum::from_terms(
            2,
            vec![(1.0f32, PauliString::single(2, 0, Pauli::Z).unwrap())],
        )
        .unwrap();
        assert!((s.expectation(&z).unwrap() - 1.0f32.cos()).abs() < 1e-6);
    }
}
