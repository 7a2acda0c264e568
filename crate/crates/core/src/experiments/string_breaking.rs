use serde::Serialize;

use super::{mean_std, run_vqe, ExperimentConfig, Problem};
use crate::error::{Error, Result};
use crate::lattice::{LadderLattice, Site, StaticCharges};
use crate::optimize::{derive_seed, multi_start};
use crate::pauli::{Pauli, PauliString};
use crate::state::StateVector;

#[derive(Clone, Debug, Serialize)]
pub struct PotentialRow {
    /// Position of the second charge.
    pub site: Site,
    pub distance: usize,
    pub energy: f64,
    /// `energy` minus the vacuum energy.
    pub potential: f64,
    pub residual: f64,
    /// `<Z>` on every site qubit, in lattice site order.
    pub site_z: Vec<f64>,
    /// `<X>` on every link qubit, in lattice link order.
    pub link_x: Vec<f64>,
    pub vqe_energy: Option<f64>,
    pub vqe_potential: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AverageRow {
    pub distance: usize,
    pub count: usize,
    pub mean_potential: f64,
    pub mean_vqe_potential: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StaticPotentialTable {
    pub plaquettes: usize,
    pub reference: Site,
    pub sites: Vec<Site>,
    /// Link endpoints, in lattice link order.
    pub links: Vec<[Site; 2]>,
    pub vacuum_energy: f64,
    pub vacuum_site_z: Vec<f64>,
    pub vacuum_link_x: Vec<f64>,
    pub vqe_vacuum_energy: Option<f64>,
    pub rows: Vec<PotentialRow>,
    pub averages: Vec<AverageRow>,
}

impl StaticPotentialTable {
    pub fn average(&self, distance: usize) -> Option<&AverageRow> {
        self.averages.iter().find(|a| a.distance == distance)
    }

    pub fn row(&self, site: Site) -> Option<&PotentialRow> {
        self.rows.iter().find(|r| r.site == site)
    }
}

fn single_expectations(
    lattice: &LadderLattice,
    state: &StateVector<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = lattice.n_qubits();
    let mut site_z = Vec::with_capacity(lattice.sites().len());
    for &s in lattice.sites() {
        let p = PauliString::single(n, lattice.qubit_of_site(s)?, Pauli::Z)?;
        site_z.push(state.expectation_string(&p)?.re);
    }
    let mut link_x = Vec::with_capacity(lattice.links().len());
    for l in 0..lattice.links().len() {
        let p = PauliString::single(n, lattice.qubit_of_link(l), Pauli::X)?;
        link_x.push(state.expectation_string(&p)?.re);
    }
    Ok((site_z, link_x))
}

struct SectorSolution {
    energy: f64,
    residual: f64,
    site_z: Vec<f64>,
    link_x: Vec<f64>,
    vqe_energy: Option<f64>,
}

fn solve(config: &ExperimentConfig, problem: &Problem, vqe_seed: u64) -> Result<SectorSolution> {
    let res = problem.sector_oracle(config, 64)?;
    let state = res
        .ground_state
        .as_ref()
        .ok_or_else(|| Error::Invariant("sector oracle returned no state".into()))?;
    let (site_z, link_x) = single_expectations(&problem.lattice, state)?;
    let vqe_energy = if config.string_breaking.vqe {
        let eval = problem.evaluator(problem.circuit(config.ansatz, config.layers)?)?;
        let runs = multi_start(config.n_runs, |run_id| {
            run_vqe(
                config,
                &eval,
                config.init,
                derive_seed(vqe_seed, run_id as u64),
            )
        });
        let best = runs
            .into_iter()
            .filter_map(|r| r.ok().map(|t| t.final_energy))
            .reduce(f64::min)
            .ok_or(Error::NotConverged {
                what: "every string-breaking VQE run",
                best: f64::NAN,
            })?;
        Some(best)
    } else {
        None
    };
    Ok(SectorSolution {
        energy: res.ground_energy,
        residual: res.residual,
        site_z,
        link_x,
        vqe_energy,
    })
}

/// Static potential `V(d) = E(reference, s) − E(vacuum)` for every placement
/// `s` of a second charge, from sector oracle ground states and optionally
/// from VQE. Rows are ordered by distance, then by site.
pub fn string_breaking_scan(config: &ExperimentConfig) -> Result<StaticPotentialTable> {
    config.validate()?;
    if !config.charges.is_empty() {
        return Err(Error::InvalidArgument(
            "string breaking places its own charges; leave \"charges\" empty".into(),
        ));
    }
    let lattice = config.lattice()?;
    let [rc, rl] = config.string_breaking.reference;
    let reference = Site::new(rc, rl);
    lattice.site_index(reference)?;

    let mut placements = Vec::new();
    for &s in lattice.sites() {
        if s == reference {
            continue;
        }
        let d = lattice.link_distance(reference, s)?;
        if config
            .string_breaking
            .max_distance
            .is_none_or(|max| d <= max)
        {
            placements.push((d, s));
        }
    }
    placements.sort_by_key(|&(d, s)| (d, lattice.site_index(s).unwrap_or(usize::MAX)));

    let vacuum_problem = Problem::with_charges(config, lattice.clone(), StaticCharges::none())?;
    let vacuum = solve(config, &vacuum_problem, derive_seed(config.seed, 0))?;

    let mut rows = Vec::with_capacity(placements.len());
    for (i, &(distance, site)) in placements.iter().enumerate() {
        let charges = StaticCharges::new(&lattice, &[reference, site])?;
        let problem = Problem::with_charges(config, lattice.clone(), charges)?;
        let sol = solve(config, &problem, derive_seed(config.seed, 1 + i as u64))?;
        rows.push(PotentialRow {
            site,
            distance,
            potential: sol.energy - vacuum.energy,
            energy: sol.energy,
            residual: sol.residual,
            site_z: sol.site_z,
            link_x: sol.link_x,
            vqe_potential: sol.vqe_energy.zip(vacuum.vqe_energy).map(|(e, v)| e - v),
            vqe_energy: sol.vqe_energy,
        });
    }

    let mut averages: Vec<AverageRow> = Vec::new();
    for row in &rows {
        if averages.last().is_some_and(|a| a.distance == row.distance) {
            continue;
        }
        let same: Vec<&PotentialRow> = rows.iter().filter(|r| r.distance == row.distance).collect();
        let potentials: Vec<f64> = same.iter().map(|r| r.potential).collect();
        let vqe: Option<Vec<f64>> = same.iter().map(|r| r.vqe_potential).collect();
        averages.push(AverageRow {
            distance: row.distance,
            count: same.len(),
            mean_potential: mean_std(&potentials).0,
            mean_vqe_potential: vqe.map(|v| mean_std(&v).0),
        });
    }

    Ok(StaticPotentialTable {
        plaquettes: lattice.n_plaquettes(),
        reference,
        sites: lattice.sites().to_vec(),
        links: lattice
            .links()
            .iter()
            .map(|l| [l.origin, l.target()])
            .collect(),
        vacuum_energy: vacuum.energy,
        vacuum_site_z: vacuum.site_z,
        vacuum_link_x: vacuum.link_x,
        vqe_vacuum_energy: vacuum.vqe_energy,
        rows,
        averages,
    })
}
