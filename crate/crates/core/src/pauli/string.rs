use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper bound on the register width; masks are stored in a single word.
pub const MAX_QUBITS: usize = 64;

/// A power of the imaginary unit, `i^k` with `k` in `0..4`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u32 {
        self.0 as u32
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex<T: Real>(self) -> Complex<T> {
        match self.0 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        self * Phase::MINUS_ONE
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Phased tensor product of single-qubit Paulis.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

fn width_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::from_masks(n_qubits, 0, 0, Phase::ONE)
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64, phase: Phase) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "pauli string width",
                requested: n_qubits,
                limit: MAX_QUBITS,
            });
        }
        let outside = !width_mask(n_qubits);
        if (x | z) & outside != 0 {
            let index = 63 - ((x | z) & outside).leading_zeros() as usize;
            return Err(Error::QubitIndex { index, n_qubits });
        }
        Ok(Self {
            n_qubits,
            x,
            z,
            phase,
        })
    }

    /// Product of single-qubit factors, multiplied left to right. Repeated
    /// qubits are allowed and combined with the correct phase.
    pub fn from_ops(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut acc = Self::identity(n_qubits)?;
        for &(q, p) in ops {
            acc = acc.mul(&Self::single(n_qubits, q, p)?)?;
        }
        Ok(acc)
    }

    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits,
            });
        }
        let (xb, zb) = pauli.bits();
        Self::from_masks(
            n_qubits,
            (xb as u64) << qubit,
            (zb as u64) << qubit,
            Phase::ONE,
        )
    }

    /// `Z` on every qubit in `mask`.
    pub fn z_product(n_qubits: usize, mask: u64) -> Result<Self> {
        Self::from_masks(n_qubits, 0, mask, Phase::ONE)
    }

    /// `X` on every qubit in `mask`.
    pub fn x_product(n_qubits: usize, mask: u64) -> Result<Self> {
        Self::from_masks(n_qubits, mask, 0, Phase::ONE)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    /// Exponent `k` such that this string equals `i^k X^x Z^z`, where the
    /// `Z` factors act first. Uses `Y = i X Z`.
    pub fn xz_exponent(&self) -> u32 {
        self.phase.exponent() + (self.x & self.z).count_ones()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            phase: self.phase.conj(),
            ..*self
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

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        let (ax, az, bx, bz) = (self.x, self.z, other.x, other.z);
        let a_x = ax & !az;
        let a_y = ax & az;
        let a_z = az & !ax;
        let b_x = bx & !bz;
        let b_y = bx & bz;
        let b_z = bz & !bx;
        // XY = iZ, YZ = iX, ZX = iY; reversed order gives -i.
        let plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
        let minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z);
        let k = 4 + plus.count_ones() % 4 - minus.count_ones() % 4;
        Ok(Self {
            n_qubits: self.n_qubits,
            x: ax ^ bx,
            z: az ^ bz,
            phase: self.phase * other.phase * Phase::from_exponent(k),
        })
    }

    /// True iff the symplectic overlap parity is even.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_width(other)?;
        let overlap = (self.x & other.z) ^ (self.z & other.x);
        Ok(overlap.count_ones().is_multiple_of(2))
    }

    /// True iff on every qubit the two factors are equal or one is the identity.
    pub fn qubit_wise_commutes(&self, other: &Self) -> bool {
        let both = self.support() & other.support();
        (self.x ^ other.x) & both == 0 && (self.z ^ other.z) & both == 0
    }

    /// Key used for canonical ordering: lexicographic on (z-mask, x-mask).
    pub fn sort_key(&self) -> (u64, u64) {
        (self.z, self.x)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}
