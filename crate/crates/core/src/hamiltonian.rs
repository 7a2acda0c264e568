//! Qubit Hamiltonian of the Z2 gauge theory with staggered fermions.
//!
//! Conventions: occupation `n = (1 - Z)/2` so `(-1)^n = Z` and `|0>` is the
//! empty site; the fermionic annihilator at Jordan-Wigner position `r` is
//! `(iZ)^{⊗ earlier matter qubits} ⊗ σ⁻` with `σ⁻ = (X + iY)/2`. Link qubits
//! never enter Jordan-Wigner strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LadderLattice, Site, StaticCharges};
use crate::pauli::{PauliString, PauliSum, Phase};
use crate::scalar::Real;

/// Couplings: electric `mu`, hopping `J`, mass `m` and Gauss penalty `V`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub m: f64,
    #[serde(rename = "V", default)]
    pub v: f64,
}

impl ModelParams {
    pub fn new(mu: f64, j: f64, m: f64, v: f64) -> Result<Self> {
        let p = Self { mu, j, m, v };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return bad("mu must be a finite number > 0");
        }
        if !(self.j >= 0.0) || !self.j.is_finite() {
            return bad("J must be a finite number >= 0");
        }
        if !(self.m >= 0.0) || !self.m.is_finite() {
            return bad("m must be a finite number >= 0");
        }
        if !(self.v >= 0.0) || !self.v.is_finite() {
            return bad("V must be a finite number >= 0");
        }
        Ok(())
    }
}

/// Gauss-law operator `G_l = sign · Z_site · Π X_link` at one site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussOperator {
    pub site: Site,
    /// Unsigned string (phase `+1`).
    pub string: PauliString,
    /// Staggered prefactor `(-1)^(col + leg)`.
    pub sign: i8,
}

impl GaussOperator {
    /// The operator with its sign folded into the phase.
    pub fn signed(&self) -> PauliString {
        let phase = if self.sign < 0 {
            Phase::MINUS_ONE
        } else {
            Phase::ONE
        };
        self.string.with_phase(phase)
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianBundle<T> {
    pub h_gauge: PauliSum<T>,
    pub h_matter: PauliSum<T>,
    pub h_penalty: PauliSum<T>,
    pub h_total: PauliSum<T>,
    /// One entry per site, in site-index order.
    pub gauss_ops: Vec<GaussOperator>,
}

/// `-mu Σ_links X - Σ_plaquettes ZZZZ`.
pub fn gauge_hamiltonian<T: Real>(lattice: &LadderLattice, mu: T) -> PauliSum<T> {
    let n = lattice.n_qubits();
    let mut h = PauliSum::new(n);
    for l in 0..lattice.links().len() {
        let s = PauliString::x_product(n, 1 << lattice.qubit_of_link(l)).expect("link qubit");
        h.push(-mu, s).expect("width");
    }
    for plaq in lattice.plaquettes() {
        let mask = plaq
            .iter()
            .fold(0u64, |m, &l| m | 1 << lattice.qubit_of_link(l));
        h.push(
            -T::one(),
            PauliString::z_product(n, mask).expect("link qubits"),
        )
        .expect("width");
    }
    h
}

/// Spin representation of the fermionic annihilator at `site`.
pub fn jw_lower<T: Real>(lattice: &LadderLattice, site: Site) -> Result<PauliSum<T>> {
    let n = lattice.n_qubits();
    let rank = lattice.fermion_rank(site)?;
    let string_mask = lattice.fermion_order()[..rank].iter().fold(0u64, |m, &s| {
        m | 1 << lattice.qubit_of_site(lattice.sites()[s]).unwrap()
    });
    let q = 1u64 << lattice.qubit_of_site(site)?;
    let jw_phase = Phase::from_exponent(rank as u32);
    let half = T::of(0.5);
    // (iZ)^r (X + iY)/2
    PauliSum::from_terms(
        n,
        vec![
            (half, PauliString::from_masks(n, q, string_mask, jw_phase)?),
            (
                half,
                PauliString::from_masks(n, q, string_mask | q, jw_phase * Phase::I)?,
            ),
        ],
    )
}

/// `φ†_origin Z_link φ_target + h.c.` for one link, as a simplified hermitian sum.
pub fn hopping_term<T: Real>(lattice: &LadderLattice, link: usize) -> Result<PauliSum<T>> {
    let n = lattice.n_qubits();
    let l = lattice
        .links()
        .get(link)
        .ok_or_else(|| Error::InvalidArgument(format!("no link with index {link}")))?;
    let a = jw_lower::<T>(lattice, l.origin)?;
    let b = jw_lower::<T>(lattice, l.target())?;
    let z_link = PauliSum::from_terms(
        n,
        vec![(
            T::one(),
            PauliString::z_product(n, 1 << lattice.qubit_of_link(link))?,
        )],
    )?;
    let hop = a.adjoint().mul(&z_link)?.mul(&b)?;
    hop.add(&hop.adjoint())
}

/// `J Σ_links (φ†_origin Z_link φ_target + h.c.) + m Σ_sites (-1)^(col+leg) n`.
pub fn matter_hamiltonian<T: Real>(lattice: &LadderLattice, j: T, m: T) -> PauliSum<T> {
    let n = lattice.n_qubits();
    let mut h = PauliSum::new(n);
    if j != T::zero() {
        for idx in 0..lattice.links().len() {
            let hop = hopping_term::<T>(lattice, idx).expect("link on lattice");
            for &(c, s) in hop.terms() {
                h.push(c * j, s).expect("width");
            }
        }
    }
    if m != T::zero() {
        let half = T::of(0.5);
        for &site in lattice.sites() {
            let s = T::of(lattice.staggered_sign(site).unwrap() as f64);
            let q = lattice.qubit_of_site(site).unwrap();
            h.push(m * s * half, PauliString::identity(n).unwrap())
                .unwrap();
            h.push(-m * s * half, PauliString::z_product(n, 1 << q).unwrap())
                .unwrap();
        }
    }
    h.simplified()
}

pub fn gauss_operator(lattice: &LadderLattice, site: Site) -> Result<GaussOperator> {
    let n = lattice.n_qubits();
    let sign = lattice.staggered_sign(site)?;
    let x_mask = lattice
        .links_of_site(site)?
        .into_iter()
        .fold(0u64, |m, l| m | 1 << lattice.qubit_of_link(l));
    let z_mask = 1u64 << lattice.qubit_of_site(site)?;
    Ok(GaussOperator {
        site,
        string: PauliString::from_masks(n, x_mask, z_mask, Phase::ONE)?,
        sign,
    })
}

pub fn gauss_operators(lattice: &LadderLattice) -> Vec<GaussOperator> {
    lattice
        .sites()
        .iter()
        .map(|&s| gauss_operator(lattice, s).expect("site on lattice"))
        .collect()
}

/// `V Σ_l (G_l - q_l)†(G_l - q_l) = 2V Σ_l (I - q_l G_l)`, using `G² = I`.
pub fn penalty_hamiltonian<T: Real>(
    lattice: &LadderLattice,
    charges: &StaticCharges,
    v: T,
) -> Result<PauliSum<T>> {
    if v < T::zero() {
        return Err(Error::InvalidArgument("V must be >= 0".into()));
    }
    let n = lattice.n_qubits();
    let mut h = PauliSum::new(n);
    if v == T::zero() {
        return Ok(h);
    }
    let two_v = v + v;
    for g in gauss_operators(lattice) {
        if !lattice.contains(g.site) {
            return Err(Error::OffLattice(g.site));
        }
        let q = T::of(charges.q(g.site) as f64);
        h.push(two_v, PauliString::identity(n)?)?;
        h.push(-two_v * q, g.signed())?;
    }
    for s in charges.charged_sites() {
        lattice.site_index(s)?;
    }
    Ok(h.simplified())
}

/// Fails if any term of `h` anticommutes with any Gauss operator.
pub fn check_gauss_symmetry<T: Real>(h: &PauliSum<T>, gauss: &[GaussOperator]) -> Result<()> {
    for (_, term) in h.terms() {
        for g in gauss {
            if !term.commutes(&g.string)? {
                return Err(Error::Invariant(format!(
                    "term {term} anticommutes with the Gauss operator at ({}, {})",
                    g.site.col, g.site.leg
                )));
            }
        }
    }
    Ok(())
}

pub fn total_hamiltonian<T: Real>(
    lattice: &LadderLattice,
    params: &ModelParams,
    charges: &StaticCharges,
) -> Result<HamiltonianBundle<T>> {
    params.validate()?;
    for s in charges.charged_sites() {
        lattice.site_index(s)?;
    }
    let h_gauge = gauge_hamiltonian(lattice, T::of(params.mu));
    let h_matter = matter_hamiltonian(lattice, T::of(params.j), T::of(params.m));
    let h_penalty = penalty_hamiltonian(lattice, charges, T::of(params.v))?;
    let h_total = h_gauge.add(&h_matter)?.add(&h_penalty)?;
    if !h_total.is_hermitian() {
        return Err(Error::NotHermitian("assembled Hamiltonian".into()));
    }
    let gauss_ops = gauss_operators(lattice);
    check_gauss_symmetry(&h_total, &gauss_ops)?;
    Ok(HamiltonianBundle {
        h_gauge,
        h_matter,
        h_penalty,
        h_total,
        gauss_ops,
    })
}
