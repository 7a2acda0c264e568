//! Command-line driver: reads a JSON config, applies `--set` overrides,
//! validates, dispatches to the experiment drivers and writes the outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};
use z2ladder::experiments::{
    fidelity_trace_experiment, ground_state_experiment, ground_state_sweep, string_breaking_scan,
    variance_scan, write_atomic, write_fidelity_trace, write_ground_state, write_json,
    write_string_breaking, write_sweep, write_variance_scan, ExperimentConfig, ExperimentKind,
};
use z2ladder::hamiltonian::total_hamiltonian;
use z2ladder::oracle::lanczos_with;
use z2ladder::{Error, LadderLattice, StaticCharges};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "z2ladder",
    version,
    about = "VQE experiments for the Z2 gauge ladder"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// VQE runs against the sector oracle; a `sweep` section runs a grid.
    GroundState(Common),
    /// Static potential for every placement of a second charge.
    StringBreaking(Common),
    /// Gradient variance over the scan grid.
    VarianceScan(Common),
    /// Gauss fidelity along ZZ and GI optimizations.
    FidelityTrace(Common),
    /// Sector, vacuum and optionally unconstrained ground energies.
    Exact(Common),
    /// Hamiltonian terms and Gauss operators as text.
    DumpHamiltonian(Common),
    /// Qubit layout of the lattice as JSON.
    DumpLayout(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. `--set J=5` or `--set spsa.max_iter=100`.
    /// Values are parsed as JSON and fall back to plain strings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory.
    #[arg(long, env = "Z2LADDER_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Replaces the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::GroundState(c)
            | Command::StringBreaking(c)
            | Command::VarianceScan(c)
            | Command::FidelityTrace(c)
            | Command::Exact(c)
            | Command::DumpHamiltonian(c)
            | Command::DumpLayout(c) => c,
        }
    }

    fn kind(&self) -> Option<ExperimentKind> {
        match self {
            Command::GroundState(_) => Some(ExperimentKind::GroundState),
            Command::StringBreaking(_) => Some(ExperimentKind::StringBreaking),
            Command::VarianceScan(_) => Some(ExperimentKind::VarianceScan),
            Command::FidelityTrace(_) => Some(ExperimentKind::FidelityTrace),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Capacity(String),
    NotConverged(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Capacity(_) => EXIT_CAPACITY,
            CliError::NotConverged(_) => EXIT_NOT_CONVERGED,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Capacity(m) | CliError::NotConverged(m) | CliError::Other(m) => {
                write!(f, "{m}")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => CliError::Capacity(e.to_string()),
            Error::NotConverged { .. } | Error::NonFinite { .. } => {
                CliError::NotConverged(e.to_string())
            }
            Error::InvalidArgument(_) | Error::OffLattice(_) | Error::Parse(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Other(e.to_string()),
        }
    }
}

fn config_error(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Sets `key` (dotted for nested objects) in `raw`.
pub fn apply_override(raw: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| config_error(format!("override `{assignment}` is not KEY=VALUE")))?;
    let value: Value =
        serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    let mut target = raw;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(config_error(format!("empty key segment in `{key}`")));
        }
        let obj = target
            .as_object_mut()
            .ok_or_else(|| config_error(format!("`{key}`: parent is not an object")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        target = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

/// Deserializes and validates a raw config. Missing keys, unknown keys and
/// out-of-range values are reported as config errors.
pub fn validate_config(
    raw: Value,
    kind: Option<ExperimentKind>,
) -> Result<ExperimentConfig, CliError> {
    let config: ExperimentConfig = serde_json::from_value(raw).map_err(config_error)?;
    let checked = match kind {
        Some(k) => config.validate_for(k),
        None => config.validate(),
    };
    checked.map_err(config_error)?;
    Ok(config)
}

fn load_raw(common: &Common) -> Result<Value, CliError> {
    let mut raw = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| config_error(format!("{}: {e}", path.display())))?
        }
        None => Value::Object(Map::new()),
    };
    if !raw.is_object() {
        return Err(config_error("config must be a JSON object"));
    }
    for o in &common.overrides {
        apply_override(&mut raw, o)?;
    }
    if let Some(seed) = common.seed {
        raw["seed"] = Value::from(seed);
    }
    Ok(raw)
}

fn listing(paths: &[PathBuf]) -> String {
    let mut s = String::new();
    for p in paths {
        let _ = writeln!(s, "wrote {}", p.display());
    }
    s
}

/// Runs one invocation and returns the text to print on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let common = cli.command.common();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(config_error("--threads must be >= 1"));
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let raw = load_raw(common)?;
    let out = common.out.as_path();

    if let Command::DumpLayout(_) = cli.command {
        let p = match raw.get("plaquettes") {
            None => 1,
            Some(v) => v
                .as_u64()
                .ok_or_else(|| config_error("plaquettes must be a positive integer"))?
                as usize,
        };
        let lattice = LadderLattice::build(p)?;
        let path = out.join("layout.json");
        write_json(&path, &lattice.layout_json())?;
        return Ok(listing(&[path]));
    }

    let config = validate_config(raw, cli.command.kind())?;
    let echo = out.join("config.json");
    write_json(&echo, &config)?;
    let mut written = vec![echo];
    let mut text = String::new();

    match &cli.command {
        Command::GroundState(_) if config.sweep.is_some() => {
            let report = ground_state_sweep(&config)?;
            for r in &report.rows {
                let _ = writeln!(
                    text,
                    "P={} L={} shots={} mean_relative_error={:.6e}",
                    r.plaquettes,
                    r.layers,
                    r.shots.map_or("exact".into(), |s| s.to_string()),
                    r.mean_relative_error
                );
            }
            written.extend(write_sweep(out, &config, &report)?);
        }
        Command::GroundState(_) => {
            let report = ground_state_experiment(&config)?;
            let _ = writeln!(text, "sector_energy = {}", report.sector_energy);
            let _ = writeln!(
                text,
                "runs completed {}/{}; best energy {} (relative error {:.6e}); mean {} (std {:.3e})",
                report.completed,
                report.runs.len(),
                report.best_final_energy,
                report.best_relative_error,
                report.mean_final_energy,
                report.std_final_energy
            );
            for r in report.runs.iter().filter(|r| r.error.is_some()) {
                let _ = writeln!(
                    text,
                    "run {} failed: {}",
                    r.run_id,
                    r.error.as_deref().unwrap_or("")
                );
            }
            written.extend(write_ground_state(out, &config, &report)?);
        }
        Command::StringBreaking(_) => {
            let table = string_breaking_scan(&config)?;
            let _ = writeln!(text, "vacuum_energy = {}", table.vacuum_energy);
            for a in &table.averages {
                let _ = writeln!(
                    text,
                    "d={} V={} ({} placements)",
                    a.distance, a.mean_potential, a.count
                );
            }
            written.extend(write_string_breaking(out, &config, &table)?);
        }
        Command::VarianceScan(_) => {
            let report = variance_scan(&config)?;
            for r in &report.rows {
                let _ = writeln!(
                    text,
                    "P={} L={} {} variance={:.6e}",
                    r.plaquettes,
                    r.layers,
                    r.ansatz.name(),
                    r.variance
                );
            }
            written.extend(write_variance_scan(out, &config, &report)?);
        }
        Command::FidelityTrace(_) => {
            let report = fidelity_trace_experiment(&config)?;
            for r in &report.runs {
                let _ = writeln!(
                    text,
                    "{}: final energy {} final fidelity {}",
                    r.label,
                    r.final_energy,
                    r.final_fidelity.unwrap_or(f64::NAN)
                );
            }
            written.extend(write_fidelity_trace(out, &config, &report)?);
        }
        Command::Exact(_) => {
            let (value, summary) = exact(&config)?;
            text.push_str(&summary);
            let path = out.join("exact.json");
            write_json(&path, &value)?;
            written.push(path);
        }
        Command::DumpHamiltonian(_) => {
            let lattice = config.lattice()?;
            let charges = config.static_charges(&lattice)?;
            let bundle = total_hamiltonian::<f64>(&lattice, &config.params()?, &charges)?;
            let mut body = format!(
                "# {} qubits, {} terms\n{}",
                lattice.n_qubits(),
                bundle.h_total.len(),
                bundle.h_total
            );
            body.push_str("\n# Gauss operators: site, sign, string\n");
            for g in &bundle.gauss_ops {
                let _ = writeln!(
                    body,
                    "# ({}, {}) {:+} {}",
                    g.site.col, g.site.leg, g.sign, g.string
                );
            }
            let path = out.join("hamiltonian.txt");
            write_text(&path, &body)?;
            written.push(path);
        }
        Command::DumpLayout(_) => unreachable!("handled above"),
    }
    text.push_str(&listing(&written));
    Ok(text)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))?;
    Ok(())
}

fn exact(config: &ExperimentConfig) -> Result<(Value, String), CliError> {
    let lattice = config.lattice()?;
    let params = config.params()?;
    let charges = config.static_charges(&lattice)?;
    let bundle = total_hamiltonian::<f64>(&lattice, &params, &charges)?;
    let opts = config.oracle.sector(0);
    let sector =
        z2ladder::oracle::sector_ground(&bundle.h_total, &bundle.gauss_ops, &charges, &opts)?;
    let vacuum_bundle = total_hamiltonian::<f64>(&lattice, &params, &StaticCharges::none())?;
    let vacuum = z2ladder::oracle::sector_ground(
        &vacuum_bundle.h_total,
        &vacuum_bundle.gauss_ops,
        &StaticCharges::none(),
        &opts,
    )?;
    let mut text = format!(
        "sector_energy = {}\nvacuum_energy = {}\n",
        sector.ground_energy, vacuum.ground_energy
    );
    let mut value = serde_json::json!({
        "n_qubits": lattice.n_qubits(),
        "charges": config.charges,
        "sector_energy": sector.ground_energy,
        "sector_residual": sector.residual,
        "vacuum_energy": vacuum.ground_energy,
        "vacuum_residual": vacuum.residual,
    });
    if config.oracle.unconstrained {
        let free = lanczos_with(&bundle.h_total, None, &config.oracle.lanczos(64))?;
        let fidelity = match &free.ground_state {
            Some(s) => Some(z2ladder::state::gauss_fidelity(
                s,
                &bundle.gauss_ops,
                &charges,
            )?),
            None => None,
        };
        let _ = writeln!(text, "unconstrained_energy = {}", free.ground_energy);
        value["unconstrained_energy"] = Value::from(free.ground_energy);
        value["unconstrained_gauss_fidelity"] = fidelity.map_or(Value::Null, Value::from);
    }
    Ok((value, text))
}
