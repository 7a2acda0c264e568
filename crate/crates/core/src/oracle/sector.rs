use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{min_eigenpair, residual};
use super::lanczos::{self, LanczosOptions};
use super::{Method, SpectrumResult};
use crate::error::{Error, Result};
use crate::hamiltonian::GaussOperator;
use crate::lattice::StaticCharges;
use crate::pauli::{PauliString, PauliSum, Phase};
use crate::state::{gauss_fidelity, StateVector};

/// Largest sector block handed to the dense eigensolver.
pub const SECTOR_DENSE_MAX_DIM: usize = 2048;

const SECTOR_MAX_QUBITS: usize = 20;
const MISSING: u32 = u32::MAX;

/// `P|b> = coeff · (-1)^{|b & z|} |b ^ x>` in the form used below.
fn action(p: &PauliString) -> (usize, usize, C) {
    let c = Phase::from_exponent(p.xz_exponent()).to_complex::<f64>();
    (p.x_mask() as usize, p.z_mask() as usize, c)
}

fn sign(b: usize, z: usize) -> f64 {
    if (b & z).count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Orthonormal basis of the joint eigenspace `G_l = q_l`, one sparse vector
/// per coset of the span of the Gauss operators' x-masks.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    n_qubits: usize,
    vectors: Vec<Vec<(usize, C)>>,
    /// Basis vector owning each computational index, or `MISSING`.
    owner: Vec<u32>,
    amp: Vec<C>,
}

impl SectorBasis {
    /// `q[i]` is the target eigenvalue of `gauss_ops[i]`.
    pub fn new(n_qubits: usize, gauss_ops: &[GaussOperator], q: &[i8]) -> Result<Self> {
        if n_qubits > SECTOR_MAX_QUBITS {
            return Err(Error::Capacity {
                what: "sector basis qubits",
                requested: n_qubits,
                limit: SECTOR_MAX_QUBITS,
            });
        }
        if q.len() != gauss_ops.len() {
            return Err(Error::Dimension {
                expected: gauss_ops.len(),
                got: q.len(),
            });
        }
        // Every element of the stabilizer group with its sign Π q_l.
        let mut group: Vec<(PauliString, f64)> = vec![(PauliString::identity(n_qubits)?, 1.0)];
        for (g, &ql) in gauss_ops.iter().zip(q) {
            let s = g.signed();
            if s.n_qubits() != n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    got: s.n_qubits(),
                });
            }
            let extra: Vec<_> = group
                .iter()
                .map(|(p, c)| Ok((p.mul(&s)?, c * ql as f64)))
                .collect::<Result<_>>()?;
            group.extend(extra);
        }
        let actions: Vec<(usize, usize, C)> = group
            .iter()
            .map(|(p, c)| {
                let (x, z, k) = action(p);
                (x, z, k * *c)
            })
            .collect();

        let dim = 1usize << n_qubits;
        let mut visited = vec![false; dim];
        let mut owner = vec![MISSING; dim];
        let mut amp = vec![C::default(); dim];
        let mut vectors = Vec::new();
        let mut scratch: Vec<(usize, C)> = Vec::new();
        for b in 0..dim {
            if visited[b] {
                continue;
            }
            scratch.clear();
            for &(x, z, k) in &actions {
                let t = b ^ x;
                visited[t] = true;
                let v = k * sign(b, z);
                match scratch.iter_mut().find(|e| e.0 == t) {
                    Some(e) => e.1 += v,
                    None => scratch.push((t, v)),
                }
            }
            scratch.retain(|e| e.1.norm() > 1e-9);
            let nrm = scratch.iter().map(|e| e.1.norm_sqr()).sum::<f64>().sqrt();
            if scratch.is_empty() {
                continue;
            }
            let index = vectors.len() as u32;
            let mut v: Vec<(usize, C)> = scratch.iter().map(|&(t, a)| (t, a / nrm)).collect();
            v.sort_by_key(|e| e.0);
            for &(t, a) in &v {
                owner[t] = index;
                amp[t] = a;
            }
            vectors.push(v);
        }
        Ok(Self {
            n_qubits,
            vectors,
            owner,
            amp,
        })
    }

    pub fn for_charges(
        n_qubits: usize,
        gauss_ops: &[GaussOperator],
        charges: &StaticCharges,
    ) -> Result<Self> {
        let q: Vec<i8> = gauss_ops.iter().map(|g| charges.q(g.site)).collect();
        Self::new(n_qubits, gauss_ops, &q)
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Matrix of `h` in this basis. Fails if `h` leaks out of the sector.
    pub fn block(&self, h: &PauliSum<f64>) -> Result<DMatrix<C>> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                got: h.n_qubits(),
            });
        }
        let terms: Vec<(usize, usize, C)> = h
            .terms()
            .iter()
            .map(|(c, p)| {
                let (x, z, k) = action(p);
                (x, z, k * *c)
            })
            .collect();
        let d = self.dim();
        let mut m: DMatrix<C> = DMatrix::zeros(d, d);
        let mut work = vec![C::default(); 1 << self.n_qubits];
        let mut touched: Vec<usize> = Vec::new();
        for (j, v) in self.vectors.iter().enumerate() {
            for &(b, a) in v {
                for &(x, z, k) in &terms {
                    let t = b ^ x;
                    if work[t] == C::default() {
                        touched.push(t);
                    }
                    work[t] += k * a * sign(b, z);
                }
            }
            let mut total = 0.0;
            for &t in &touched {
                total += work[t].norm_sqr();
                let o = self.owner[t];
                if o != MISSING {
                    m[(o as usize, j)] += self.amp[t].conj() * work[t];
                }
                work[t] = C::default();
            }
            touched.clear();
            let captured: f64 = m.column(j).iter().map(|c| c.norm_sqr()).sum();
            if (total - captured).abs() > 1e-9 * total.max(1.0) {
                return Err(Error::Invariant(
                    "operator does not preserve the Gauss-law sector".into(),
                ));
            }
        }
        Ok(m)
    }

    /// Full statevector from coefficients in this basis.
    pub fn embed(&self, coeffs: &[C]) -> Result<StateVector<f64>> {
        if coeffs.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: coeffs.len(),
            });
        }
        let mut amps = vec![C::default(); 1 << self.n_qubits];
        for (v, &c) in self.vectors.iter().zip(coeffs) {
            for &(b, a) in v {
                amps[b] += a * c;
            }
        }
        StateVector::from_amplitudes(self.n_qubits, amps)
    }
}

fn empty_sector() -> Error {
    Error::InvalidArgument(
        "the requested Gauss-law sector is empty (the product of all G_l fixes the charge parity)"
            .into(),
    )
}

fn dense_in_basis(h: &PauliSum<f64>, basis: &SectorBasis) -> Result<SpectrumResult> {
    if basis.dim() == 0 {
        return Err(empty_sector());
    }
    if basis.dim() > SECTOR_DENSE_MAX_DIM {
        return Err(Error::Capacity {
            what: "dense sector block dimension",
            requested: basis.dim(),
            limit: SECTOR_DENSE_MAX_DIM,
        });
    }
    let (energy, coeffs) = min_eigenpair(basis.block(h)?);
    let state = basis.embed(&coeffs)?;
    let residual = residual(h, &state, energy)?;
    Ok(SpectrumResult {
        ground_energy: energy,
        ground_state: Some(state),
        residual,
        method: Method::Dense,
        work: basis.dim(),
    })
}

/// Dense ground state restricted to the sector fixed by `charges`.
pub fn sector_dense_ground(
    h: &PauliSum<f64>,
    gauss_ops: &[GaussOperator],
    charges: &StaticCharges,
) -> Result<SpectrumResult> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian("sector oracle input".into()));
    }
    dense_in_basis(
        h,
        &SectorBasis::for_charges(h.n_qubits(), gauss_ops, charges)?,
    )
}

/// Unconstrained dense ground state of a Gauss-law symmetric `h`, obtained
/// by diagonalizing every nonempty sector block.
pub fn blocked_dense_ground(
    h: &PauliSum<f64>,
    gauss_ops: &[GaussOperator],
) -> Result<SpectrumResult> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian("dense oracle input".into()));
    }
    let l = gauss_ops.len();
    if l > 16 {
        return Err(Error::Capacity {
            what: "Gauss operators for sector enumeration",
            requested: l,
            limit: 16,
        });
    }
    let mut best: Option<SpectrumResult> = None;
    for bits in 0u32..1 << l {
        let q: Vec<i8> = (0..l)
            .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        let basis = SectorBasis::new(h.n_qubits(), gauss_ops, &q)?;
        if basis.dim() == 0 {
            continue;
        }
        let r = dense_in_basis(h, &basis)?;
        if best
            .as_ref()
            .is_none_or(|b| r.ground_energy < b.ground_energy)
        {
            best = Some(r);
        }
    }
    best.ok_or_else(empty_sector)
}

/// `strength · Σ_l (I − q_l G_l)`.
pub fn sector_penalty(
    n_qubits: usize,
    gauss_ops: &[GaussOperator],
    charges: &StaticCharges,
    strength: f64,
) -> Result<PauliSum<f64>> {
    let mut sum = PauliSum::new(n_qubits);
    for g in gauss_ops {
        sum.push(strength, PauliString::identity(n_qubits)?)?;
        sum.push(-strength * charges.q(g.site) as f64, g.signed())?;
    }
    Ok(sum.simplified())
}

#[derive(Clone, Debug, Default)]
pub struct SectorOptions {
    pub lanczos: LanczosOptions,
    /// Penalty scale Λ; defaults to ten times the l1 norm of `h`.
    pub lambda: Option<f64>,
}

/// Ground state of `h` within the sector `G_l = q_l`.
///
/// Runs Lanczos on `h + 2Λ Σ (I − q_l G_l)` from a random vector projected
/// into the sector, then checks that the result has Gauss fidelity 1. The
/// returned energy and residual refer to `h` itself.
pub fn sector_ground(
    h: &PauliSum<f64>,
    gauss_ops: &[GaussOperator],
    charges: &StaticCharges,
    opts: &SectorOptions,
) -> Result<SpectrumResult> {
    let n = h.n_qubits();
    if n > lanczos::LANCZOS_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "Lanczos qubits",
            requested: n,
            limit: lanczos::LANCZOS_MAX_QUBITS,
        });
    }
    let lambda = opts.lambda.unwrap_or(10.0 * h.l1_norm()).max(1.0);
    let shifted = h.add(&sector_penalty(n, gauss_ops, charges, 2.0 * lambda)?)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.lanczos.seed);
    let amps = (0..1usize << n)
        .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut start = StateVector::from_amplitudes(n, amps)?;
    for g in gauss_ops {
        let mut flipped = start.clone();
        flipped.apply_pauli(&g.signed())?;
        let q = charges.q(g.site) as f64;
        for (a, b) in start.amplitudes_mut().iter_mut().zip(flipped.amplitudes()) {
            *a = (*a + b * q) * 0.5;
        }
    }
    if start.norm() < 1e-6 {
        return Err(empty_sector());
    }

    let (mut result, vector) =
        lanczos::run(&shifted, Some(start.into_amplitudes()), &opts.lanczos)?;
    let state = StateVector::from_amplitudes(n, vector)?;
    let fidelity = gauss_fidelity(&state, gauss_ops, charges)?;
    if (fidelity - 1.0).abs() > 1e-9 {
        return Err(Error::Invariant(format!(
            "sector ground state has Gauss fidelity {fidelity}"
        )));
    }
    result.ground_energy = state.expectation(h)?;
    result.residual = residual(h, &state, result.ground_energy)?;
    if n <= opts.lanczos.keep_state_max_qubits {
        result.ground_state = Some(state);
    }
    Ok(result)
}
