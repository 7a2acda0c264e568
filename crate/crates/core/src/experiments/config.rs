use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzKind;
use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::lattice::{LadderLattice, Site, StaticCharges};
use crate::optimize::{GradientConfig, Mode, SpsaConfig};
use crate::oracle::{LanczosOptions, SectorOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    GroundState,
    StringBreaking,
    VarianceScan,
    FidelityTrace,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    #[default]
    Gradient,
    Spsa,
}

/// Starting parameters of each run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    /// Uniform in `[0, 2π)` from the run seed.
    #[default]
    Random,
    /// Zeros for GI, π for ZZ.
    Default,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSettings {
    pub max_krylov: usize,
    pub restart: usize,
    pub seed: u64,
    /// Penalty scale for the sector oracle; ten times the l1 norm when absent.
    pub lambda: Option<f64>,
    /// Also compute the unconstrained ground state and its Gauss fidelity.
    pub unconstrained: bool,
}

impl Default for OracleSettings {
    fn default() -> Self {
        let l = LanczosOptions::default();
        Self {
            max_krylov: l.max_krylov,
            restart: l.restart,
            seed: l.seed,
            lambda: None,
            unconstrained: false,
        }
    }
}

impl OracleSettings {
    pub fn lanczos(&self, keep_state_max_qubits: usize) -> LanczosOptions {
        LanczosOptions {
            max_krylov: self.max_krylov,
            restart: self.restart,
            seed: self.seed,
            keep_state_max_qubits,
            ..LanczosOptions::default()
        }
    }

    pub fn sector(&self, keep_state_max_qubits: usize) -> SectorOptions {
        SectorOptions {
            lanczos: self.lanczos(keep_state_max_qubits),
            lambda: self.lambda,
        }
    }
}

/// Grid of ground-state runs: every combination of the listed values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub plaquettes: Vec<usize>,
    pub layers: Vec<usize>,
    /// Shot counts; empty means the top-level `shots` setting.
    #[serde(default)]
    pub shots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub plaquettes: Vec<usize>,
    pub layers: Vec<usize>,
    pub ansatze: Vec<AnsatzKind>,
    pub samples: usize,
    /// Average the variance over every parameter instead of the designated one.
    pub all_parameters: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            plaquettes: vec![1, 2, 3],
            layers: vec![1, 2, 3],
            ansatze: vec![AnsatzKind::Gi, AnsatzKind::Zz],
            samples: 100,
            all_parameters: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct StringBreakingConfig {
    /// The fixed charge.
    pub reference: [usize; 2],
    /// Largest separation scanned; all reachable distances when absent.
    pub max_distance: Option<usize>,
    /// Also run VQE for every placement and for the vacuum.
    pub vqe: bool,
}

/// SPSA settings as they appear in a config file; seeds come from the runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaSettings {
    pub a: Option<f64>,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub stability: Option<f64>,
    pub max_iter: usize,
    pub first_step: f64,
    pub calibration_samples: usize,
    pub average_tail: f64,
}

impl Default for SpsaSettings {
    fn default() -> Self {
        let d = SpsaConfig::default();
        Self {
            a: d.a,
            c: d.c,
            alpha: d.alpha,
            gamma: d.gamma,
            stability: d.stability,
            max_iter: d.max_iter,
            first_step: d.first_step,
            calibration_samples: d.calibration_samples,
            average_tail: d.average_tail,
        }
    }
}

impl SpsaSettings {
    pub fn with_seed(&self, seed: u64) -> SpsaConfig {
        SpsaConfig {
            a: self.a,
            c: self.c,
            alpha: self.alpha,
            gamma: self.gamma,
            stability: self.stability,
            max_iter: self.max_iter,
            first_step: self.first_step,
            calibration_samples: self.calibration_samples,
            average_tail: self.average_tail,
            seed,
        }
    }
}

fn one() -> usize {
    1
}

fn gi() -> AnsatzKind {
    AnsatzKind::Gi
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Optional; when present it must match the command being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default = "one")]
    pub plaquettes: usize,
    pub mu: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub m: f64,
    #[serde(rename = "V", default)]
    pub v: f64,
    /// Static charges as `[col, leg]` pairs.
    #[serde(default)]
    pub charges: Vec<[usize; 2]>,
    #[serde(default = "gi")]
    pub ansatz: AnsatzKind,
    #[serde(default = "one")]
    pub layers: usize,
    #[serde(default)]
    pub optimizer: OptimizerKind,
    #[serde(default)]
    pub gradient: GradientConfig,
    #[serde(default)]
    pub spsa: SpsaSettings,
    /// Shots per cost evaluation; exact expectation values when absent.
    #[serde(default)]
    pub shots: Option<usize>,
    #[serde(default = "one")]
    pub n_runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitKind,
    /// Stop after the first run whose relative error is below this value;
    /// runs then execute one after another.
    #[serde(default)]
    pub stop_within: Option<f64>,
    #[serde(default)]
    pub oracle: OracleSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub string_breaking: StringBreakingConfig,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl ExperimentConfig {
    /// Minimal config with the given couplings and defaults elsewhere.
    pub fn new(plaquettes: usize, mu: f64, j: f64, m: f64) -> Self {
        Self {
            experiment: None,
            plaquettes,
            mu,
            j,
            m,
            v: 0.0,
            charges: Vec::new(),
            ansatz: AnsatzKind::Gi,
            layers: 1,
            optimizer: OptimizerKind::default(),
            gradient: GradientConfig::default(),
            spsa: SpsaSettings::default(),
            shots: None,
            n_runs: 1,
            seed: 0,
            init: InitKind::default(),
            stop_within: None,
            oracle: OracleSettings::default(),
            sweep: None,
            scan: ScanConfig::default(),
            string_breaking: StringBreakingConfig::default(),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.mu, self.j, self.m, self.v)
    }

    pub fn lattice(&self) -> Result<LadderLattice> {
        LadderLattice::build(self.plaquettes)
    }

    pub fn static_charges(&self, lattice: &LadderLattice) -> Result<StaticCharges> {
        let sites: Vec<Site> = self.charges.iter().map(|&[c, l]| Site::new(c, l)).collect();
        StaticCharges::new(lattice, &sites)
    }

    pub fn mode(&self, seed: u64) -> Mode {
        match self.shots {
            None => Mode::Exact,
            Some(count) => Mode::Shots { count, seed },
        }
    }

    /// Checks everything that can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.plaquettes < 1 {
            return Err(bad("plaquettes must be >= 1"));
        }
        let lattice = self.lattice()?;
        self.static_charges(&lattice)?;
        if self.layers < 1 {
            return Err(bad("layers must be >= 1"));
        }
        if self.n_runs < 1 {
            return Err(bad("n_runs must be >= 1"));
        }
        if self.shots == Some(0) {
            return Err(bad("shots must be >= 1"));
        }
        if self.shots.is_some() && self.optimizer == OptimizerKind::Gradient {
            return Err(bad(
                "the gradient optimizer needs exact mode; use \"optimizer\": \"spsa\" with shots",
            ));
        }
        if let Some(t) = self.stop_within {
            if !(t > 0.0) {
                return Err(bad("stop_within must be > 0"));
            }
        }
        let g = &self.gradient;
        if g.max_iter < 1 || !(g.grad_tol >= 0.0) || !(g.step_tol >= 0.0) {
            return Err(bad(
                "gradient: max_iter >= 1 and non-negative tolerances required",
            ));
        }
        let s = &self.spsa;
        if s.max_iter < 1 || !(s.c > 0.0) || s.a.is_some_and(|a| !(a > 0.0)) {
            return Err(bad("spsa: max_iter >= 1, c > 0 and a > 0 required"));
        }
        if !(0.0..=1.0).contains(&s.average_tail) {
            return Err(bad("spsa: average_tail must lie in [0, 1]"));
        }
        if self.oracle.restart < 2 || self.oracle.max_krylov < 2 {
            return Err(bad("oracle: restart and max_krylov must be >= 2"));
        }
        if let Some(sw) = &self.sweep {
            if sw.plaquettes.is_empty() || sw.layers.is_empty() {
                return Err(bad("sweep: plaquettes and layers must be nonempty"));
            }
            if sw.plaquettes.contains(&0) || sw.layers.contains(&0) || sw.shots.contains(&0) {
                return Err(bad("sweep: entries must be >= 1"));
            }
            if !sw.shots.is_empty() && self.optimizer == OptimizerKind::Gradient {
                return Err(bad("sweep: shot counts need \"optimizer\": \"spsa\""));
            }
        }
        let sc = &self.scan;
        if sc.plaquettes.is_empty() || sc.layers.is_empty() || sc.ansatze.is_empty() {
            return Err(bad("scan: plaquettes, layers and ansatze must be nonempty"));
        }
        if sc.plaquettes.iter().any(|p| !(1..=4).contains(p)) {
            return Err(bad("scan: plaquettes must lie in 1..=4"));
        }
        if sc.layers.iter().any(|l| !(1..=3).contains(l)) {
            return Err(bad("scan: layers must lie in 1..=3"));
        }
        if sc.samples < 2 {
            return Err(bad("scan: samples must be >= 2"));
        }
        let [c, l] = self.string_breaking.reference;
        if !lattice.contains(Site::new(c, l)) {
            return Err(Error::OffLattice(Site::new(c, l)));
        }
        if self.string_breaking.max_distance == Some(0) {
            return Err(bad("string_breaking: max_distance must be >= 1"));
        }
        Ok(())
    }

    /// Checks specific to one experiment, on top of [`Self::validate`].
    pub fn validate_for(&self, kind: ExperimentKind) -> Result<()> {
        self.validate()?;
        if let Some(k) = self.experiment {
            if k != kind {
                return Err(bad(format!(
                    "config is for experiment {k:?} but {kind:?} was requested"
                )));
            }
        }
        match kind {
            ExperimentKind::StringBreaking if !self.charges.is_empty() => Err(bad(
                "string_breaking places its own charges; leave \"charges\" empty",
            )),
            ExperimentKind::FidelityTrace if self.shots.is_some() => {
                Err(bad("fidelity_trace runs in exact mode; remove \"shots\""))
            }
            _ => Ok(()),
        }
    }
}
