//! Parametrized circuits: the gauge-invariant Hamiltonian variational ansatz
//! (GI) and the multi-qubit-Z-rotation ansatz (ZZ).
//!
//! Every parametrized gate is `exp(-iθ/2 · P)` for a hermitian Pauli string
//! `P`, and every parameter drives exactly one gate.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hamiltonian::{gauss_operators, hopping_term};
use crate::lattice::{LadderLattice, StaticCharges};
use crate::pauli::{Pauli, PauliString, Phase};
use crate::scalar::Real;
use crate::state::Gate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzKind {
    Gi,
    Zz,
}

impl AnsatzKind {
    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::Gi => "gi",
            AnsatzKind::Zz => "zz",
        }
    }
}

/// Fixed state-preparation gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrepGate {
    H(usize),
    X(usize),
}

/// Which Hamiltonian or hardware term a parametrized gate stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateRole {
    Plaquette,
    Electric,
    Mass,
    Hopping,
    Rx,
    Rz,
    Rzzz,
    Rzzzz,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamGate {
    pub generator: PauliString,
    pub param: usize,
    pub layer: usize,
    pub role: GateRole,
}

#[derive(Clone, Debug)]
pub struct ParamCircuit {
    n_qubits: usize,
    kind: Option<AnsatzKind>,
    layers: usize,
    prep: Vec<PrepGate>,
    gates: Vec<ParamGate>,
}

impl ParamCircuit {
    /// Custom circuit; gate `i` must carry parameter index `i`.
    pub fn new(
        n_qubits: usize,
        layers: usize,
        prep: Vec<PrepGate>,
        gates: Vec<ParamGate>,
    ) -> Result<Self> {
        for p in &prep {
            let (PrepGate::H(q) | PrepGate::X(q)) = *p;
            if q >= n_qubits {
                return Err(Error::QubitIndex { index: q, n_qubits });
            }
        }
        for (i, g) in gates.iter().enumerate() {
            if g.param != i {
                return Err(Error::InvalidArgument(format!(
                    "gate {i} carries parameter {}; parameters must be numbered in gate order",
                    g.param
                )));
            }
            if g.generator.n_qubits() != n_qubits {
                return Err(Error::Dimension {
                    expected: n_qubits,
                    got: g.generator.n_qubits(),
                });
            }
            if !g.generator.is_hermitian() || g.generator.is_identity() {
                return Err(Error::NotHermitian(format!("generator {}", g.generator)));
            }
        }
        Ok(Self {
            n_qubits,
            kind: None,
            layers,
            prep,
            gates,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kind(&self) -> Option<AnsatzKind> {
        self.kind
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn n_params(&self) -> usize {
        self.gates.len()
    }

    pub fn prep(&self) -> &[PrepGate] {
        &self.prep
    }

    pub fn param_gates(&self) -> &[ParamGate] {
        &self.gates
    }

    /// Index of the first parameter of the last layer.
    pub fn designated_param(&self) -> usize {
        let last = self.layers.saturating_sub(1);
        self.gates.iter().position(|g| g.layer == last).unwrap_or(0)
    }

    pub fn prep_gates<T: Real>(&self) -> Vec<Gate<T>> {
        self.prep
            .iter()
            .map(|p| match *p {
                PrepGate::H(q) => Gate::H(q),
                PrepGate::X(q) => Gate::X(q),
            })
            .collect()
    }

    pub fn param_gate<T: Real>(&self, index: usize, angle: T) -> Gate<T> {
        let g = &self.gates[index];
        if g.role == GateRole::Rx && g.generator.weight() == 1 {
            let q = g.generator.x_mask().trailing_zeros() as usize;
            return Gate::Rx(q, angle);
        }
        Gate::PauliRot {
            generator: g.generator,
            angle,
        }
    }

    /// Concrete gate list: preparation first, then the layers in order.
    pub fn bind<T: Real>(&self, theta: &[T]) -> Result<Vec<Gate<T>>> {
        if theta.len() != self.n_params() {
            return Err(Error::Dimension {
                expected: self.n_params(),
                got: theta.len(),
            });
        }
        let mut out = self.prep_gates();
        out.extend(
            theta
                .iter()
                .enumerate()
                .map(|(i, &a)| self.param_gate(i, a)),
        );
        Ok(out)
    }

    /// Default starting point: zeros for GI, π everywhere for ZZ.
    pub fn default_parameters(&self) -> Vec<f64> {
        match self.kind {
            Some(AnsatzKind::Zz) => vec![PI; self.n_params()],
            _ => vec![0.0; self.n_params()],
        }
    }

    /// Angles drawn uniformly from `[0, 2π)`.
    pub fn random_parameters(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.n_params())
            .map(|_| rng.random::<f64>() * TAU)
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let prep: Vec<Value> = self
            .prep
            .iter()
            .map(|p| match *p {
                PrepGate::H(q) => json!({"gate": "H", "targets": [q]}),
                PrepGate::X(q) => json!({"gate": "X", "targets": [q]}),
            })
            .collect();
        let gates: Vec<Value> = self
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let gate: Gate<f64> = self.param_gate(i, 0.0);
                json!({
                    "gate": gate.kind(),
                    "targets": gate.targets(),
                    "generator": g.generator.to_string(),
                    "role": g.role,
                    "layer": g.layer,
                    "param": g.param,
                })
            })
            .collect();
        json!({
            "n_qubits": self.n_qubits,
            "ansatz": self.kind.map(AnsatzKind::name),
            "layers": self.layers,
            "n_params": self.n_params(),
            "prep": prep,
            "gates": gates,
        })
    }
}

/// Matter qubits that need an `X` so that the product state with empty sites
/// and links in `|+>` has `G_l = q_l` at every site.
pub fn sector_prep_flips(lattice: &LadderLattice, charges: &StaticCharges) -> Result<Vec<usize>> {
    let mut flips = Vec::new();
    for g in gauss_operators(lattice) {
        // Z on |0> and X on |+> both give +1, leaving only the staggered sign.
        let mut eigen = g.sign;
        let site_q = lattice.qubit_of_site(g.site)?;
        debug_assert_eq!(g.string.z_mask(), 1 << site_q);
        let target = charges.q(g.site);
        if eigen != target {
            flips.push(site_q);
            eigen = -eigen;
        }
        debug_assert_eq!(eigen, target);
    }
    Ok(flips)
}

fn check_layers(layers: usize) -> Result<()> {
    if layers < 1 {
        return Err(Error::InvalidArgument("layers must be >= 1".into()));
    }
    Ok(())
}

/// Gauge-invariant Hamiltonian variational ansatz prepared in the Gauss-law
/// sector fixed by `charges`.
pub fn gi_circuit(
    lattice: &LadderLattice,
    layers: usize,
    charges: &StaticCharges,
) -> Result<ParamCircuit> {
    check_layers(layers)?;
    for s in charges.charged_sites() {
        lattice.site_index(s)?;
    }
    let n = lattice.n_qubits();
    let mut prep: Vec<PrepGate> = sector_prep_flips(lattice, charges)?
        .into_iter()
        .map(PrepGate::X)
        .collect();
    prep.extend((0..lattice.links().len()).map(|l| PrepGate::H(lattice.qubit_of_link(l))));

    let mut layer_gens: Vec<(PauliString, GateRole)> = Vec::new();
    for plaq in lattice.plaquettes() {
        let mask = plaq
            .iter()
            .fold(0u64, |m, &l| m | 1 << lattice.qubit_of_link(l));
        layer_gens.push((PauliString::z_product(n, mask)?, GateRole::Plaquette));
    }
    for l in 0..lattice.links().len() {
        layer_gens.push((
            PauliString::x_product(n, 1 << lattice.qubit_of_link(l))?,
            GateRole::Electric,
        ));
    }
    for &s in lattice.sites() {
        layer_gens.push((
            PauliString::z_product(n, 1 << lattice.qubit_of_site(s)?)?,
            GateRole::Mass,
        ));
    }
    for l in 0..lattice.links().len() {
        for &(_, s) in hopping_term::<f64>(lattice, l)?.terms() {
            layer_gens.push((s.with_phase(Phase::ONE), GateRole::Hopping));
        }
    }
    let mut circuit = layered(n, layers, prep, &layer_gens)?;
    circuit.kind = Some(AnsatzKind::Gi);
    Ok(circuit)
}

/// Hardware-efficient ansatz of `RX` on every qubit, `R_ZZZ` on every
/// (site, link, site) edge and `R_ZZZZ` on every plaquette; optionally an
/// extra `RZ` on every qubit after the `RX` sublayer.
pub fn zz_circuit_with(
    lattice: &LadderLattice,
    layers: usize,
    rz_sublayer: bool,
) -> Result<ParamCircuit> {
    check_layers(layers)?;
    let n = lattice.n_qubits();
    let prep = (0..lattice.links().len())
        .map(|l| PrepGate::H(lattice.qubit_of_link(l)))
        .collect();
    let mut layer_gens = Vec::new();
    for q in 0..n {
        layer_gens.push((PauliString::single(n, q, Pauli::X)?, GateRole::Rx));
    }
    if rz_sublayer {
        for q in 0..n {
            layer_gens.push((PauliString::single(n, q, Pauli::Z)?, GateRole::Rz));
        }
    }
    for (l, link) in lattice.links().iter().enumerate() {
        let mask = 1u64 << lattice.qubit_of_site(link.origin)?
            | 1u64 << lattice.qubit_of_link(l)
            | 1u64 << lattice.qubit_of_site(link.target())?;
        layer_gens.push((PauliString::z_product(n, mask)?, GateRole::Rzzz));
    }
    for plaq in lattice.plaquettes() {
        let mask = plaq
            .iter()
            .fold(0u64, |m, &l| m | 1 << lattice.qubit_of_link(l));
        layer_gens.push((PauliString::z_product(n, mask)?, GateRole::Rzzzz));
    }
    let mut circuit = layered(n, layers, prep, &layer_gens)?;
    circuit.kind = Some(AnsatzKind::Zz);
    Ok(circuit)
}

pub fn zz_circuit(lattice: &LadderLattice, layers: usize) -> Result<ParamCircuit> {
    zz_circuit_with(lattice, layers, false)
}

/// ZZ ansatz with extra `X` gates on matter qubits so that the all-π point
/// lies in the sector fixed by `charges`.
///
/// At θ = π every gate is a Pauli string up to a phase, so it flips `G_l`
/// exactly when it anticommutes with it; the flips are tracked symbolically.
pub fn zz_circuit_in_sector(
    lattice: &LadderLattice,
    layers: usize,
    charges: &StaticCharges,
    rz_sublayer: bool,
) -> Result<ParamCircuit> {
    for s in charges.charged_sites() {
        lattice.site_index(s)?;
    }
    let mut circuit = zz_circuit_with(lattice, layers, rz_sublayer)?;
    let mut flips = Vec::new();
    for g in gauss_operators(lattice) {
        // Links start in |+> and matter in |0>, so G_l starts at its sign.
        let mut eigen = g.sign;
        for gate in &circuit.gates {
            if !gate.generator.commutes(&g.string)? {
                eigen = -eigen;
            }
        }
        if eigen != charges.q(g.site) {
            flips.push(PrepGate::X(lattice.qubit_of_site(g.site)?));
        }
    }
    flips.append(&mut circuit.prep);
    circuit.prep = flips;
    Ok(circuit)
}

/// The circuit the experiments use: GI prepared in the sector of `charges`,
/// ZZ aligned so that its all-π point lies in that sector.
pub fn build_circuit(
    kind: AnsatzKind,
    lattice: &LadderLattice,
    layers: usize,
    charges: &StaticCharges,
) -> Result<ParamCircuit> {
    match kind {
        AnsatzKind::Gi => gi_circuit(lattice, layers, charges),
        AnsatzKind::Zz => zz_circuit_in_sector(lattice, layers, charges, false),
    }
}

fn layered(
    n: usize,
    layers: usize,
    prep: Vec<PrepGate>,
    layer_gens: &[(PauliString, GateRole)],
) -> Result<ParamCircuit> {
    let mut gates = Vec::with_capacity(layers * layer_gens.len());
    for layer in 0..layers {
        for &(generator, role) in layer_gens {
            gates.push(ParamGate {
                generator,
                param: gates.len(),
                layer,
                role,
            });
        }
    }
    ParamCircuit::new(n, layers, prep, gates)
}
