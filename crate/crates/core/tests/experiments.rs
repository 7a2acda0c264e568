mod common;

use common::{c, dense_string, dense_sum, identity, min_eigenvalue};
use z2ladder::ansatz::{GateRole, ParamCircuit, ParamGate};
use z2ladder::experiments::{
    fidelity_trace_experiment, gradient_variance, ground_state_experiment, ground_state_sweep,
    relative_error, string_breaking_scan, variance_scan, write_fidelity_trace, write_ground_state,
    write_string_breaking, write_sweep, write_variance_scan, ExperimentConfig, ExperimentKind,
    InitKind, OptimizerKind, ScanConfig, SweepConfig,
};
use z2ladder::hamiltonian::{gauss_operators, total_hamiltonian};
use z2ladder::optimize::{Evaluator, Mode};
use z2ladder::pauli::{Pauli, PauliString, PauliSum};
use z2ladder::{AnsatzKind, LadderLattice, ModelParams, Site, StaticCharges};

fn unit_config() -> ExperimentConfig {
    ExperimentConfig::new(1, 1.0, 1.0, 1.0)
}

/// Sector ground energy from a dense matrix with a large projector penalty.
fn dense_sector_energy(p: usize, params: &ModelParams, charges: &[Site]) -> f64 {
    let lat = LadderLattice::build(p).unwrap();
    let ch = StaticCharges::new(&lat, charges).unwrap();
    let h = total_hamiltonian::<f64>(&lat, params, &StaticCharges::none())
        .unwrap()
        .h_total;
    let n = lat.n_qubits();
    let mut m = dense_sum(&h);
    for g in gauss_operators(&lat) {
        let q = ch.q(g.site) as f64;
        m += (identity(n) - dense_string(&g.signed()) * c(q, 0.0)) * c(500.0, 0.0);
    }
    min_eigenvalue(&m)
}

#[test]
fn gi_reaches_the_sector_ground_state_on_one_plaquette() {
    let config = ExperimentConfig {
        layers: 3,
        n_runs: 3,
        ..unit_config()
    };
    let report = ground_state_experiment(&config).unwrap();
    let dense = dense_sector_energy(1, &config.params().unwrap(), &[]);
    assert!((report.sector_energy - dense).abs() < 1e-9);
    assert_eq!(report.completed, 3);
    assert!(
        report.best_relative_error < 1e-4,
        "{}",
        report.best_relative_error
    );
    for r in &report.runs {
        assert!(r.final_energy.unwrap() >= report.sector_energy - 1e-9);
        assert!((r.final_fidelity.unwrap() - 1.0).abs() < 1e-9);
    }
    let e = report.final_energies();
    let mean = e.iter().sum::<f64>() / 3.0;
    assert!((report.mean_final_energy - mean).abs() < 1e-12);
    assert_eq!(report.traces.len(), 3);
}

#[test]
fn relative_error_ratio() {
    assert_eq!(relative_error(-9.0, -10.0), 0.1);
    assert_eq!(relative_error(-10.0, -10.0), 0.0);
}

#[test]
fn stop_within_ends_at_the_first_success() {
    let config = ExperimentConfig {
        layers: 3,
        n_runs: 6,
        stop_within: Some(1e-6),
        ..unit_config()
    };
    let report = ground_state_experiment(&config).unwrap();
    assert!(report.runs.len() < 6);
    let last = report.runs.last().unwrap();
    assert!(last.relative_error.unwrap() < 1e-6);
    assert!(report.runs[..report.runs.len() - 1]
        .iter()
        .all(|r| r.relative_error.unwrap() >= 1e-6));
}

#[test]
fn spsa_with_shots_runs_and_counts_shots() {
    let config = ExperimentConfig {
        optimizer: OptimizerKind::Spsa,
        shots: Some(200),
        n_runs: 2,
        charges: vec![[0, 0], [1, 0]],
        ..unit_config()
    };
    let mut config = config;
    config.spsa.max_iter = 30;
    let report = ground_state_experiment(&config).unwrap();
    assert_eq!(report.completed, 2);
    for r in &report.runs {
        assert!(r.shots_used > 0);
        assert!(r.final_energy.unwrap() >= report.sector_energy - 1e-9);
    }
    let again = ground_state_experiment(&config).unwrap();
    assert_eq!(report.final_energies(), again.final_energies());
}

#[test]
fn unconstrained_oracle_is_reported() {
    let mut config = ExperimentConfig::new(1, 2.0, 5.0, 1.0);
    config.charges = vec![[0, 0], [1, 0]];
    config.oracle.unconstrained = true;
    config.gradient.max_iter = 5;
    let report = ground_state_experiment(&config).unwrap();
    let free = report.unconstrained_energy.unwrap();
    assert!(free < report.sector_energy);
    assert!(report.unconstrained_fidelity.unwrap() < 1.0 - 1e-6);
}

#[test]
fn sweep_cells_do_not_depend_on_the_grid() {
    let mut config = unit_config();
    config.n_runs = 2;
    config.gradient.max_iter = 40;
    config.sweep = Some(SweepConfig {
        plaquettes: vec![1],
        layers: vec![1, 2],
        shots: vec![],
    });
    let full = ground_state_sweep(&config).unwrap();
    assert_eq!(full.rows.len(), 2);
    config.sweep = Some(SweepConfig {
        plaquettes: vec![1],
        layers: vec![2],
        shots: vec![],
    });
    let single = ground_state_sweep(&config).unwrap();
    assert_eq!(
        full.rows[1].mean_final_energy,
        single.rows[0].mean_final_energy
    );
    assert_eq!(full.rows[1].layers, 2);
    assert!(ground_state_sweep(&unit_config()).is_err());
}

#[test]
fn product_circuit_variance_matches_the_uniform_angle_integral() {
    // RX(θ) on |0> gives <Z> = cos θ, so the derivative is −sin θ with
    // variance 1/2 over uniform θ.
    let n = 3;
    let gates: Vec<ParamGate> = (0..n)
        .map(|q| ParamGate {
            generator: PauliString::single(n, q, Pauli::X).unwrap(),
            param: q,
            layer: 0,
            role: GateRole::Rx,
        })
        .collect();
    let circuit = ParamCircuit::new(n, 1, vec![], gates).unwrap();
    let mut h = PauliSum::<f64>::new(n);
    for q in 0..n {
        h.push(1.0, PauliString::single(n, q, Pauli::Z).unwrap())
            .unwrap();
    }
    let eval = Evaluator::new(circuit, h, Mode::Exact).unwrap();
    let samples = 4000;
    let (mean, var) = gradient_variance(&eval, samples, 5, false).unwrap();
    // Standard error of the sample variance is sqrt(1/8/samples) ≈ 0.0056.
    assert!((var - 0.5).abs() < 0.03, "{var}");
    assert!(mean.abs() < 0.05, "{mean}");
    let (_, var_all) = gradient_variance(&eval, samples, 5, true).unwrap();
    assert!((var_all - 0.5).abs() < 0.03, "{var_all}");
    assert!(gradient_variance(&eval, 1, 5, false).is_err());
}

#[test]
fn variance_scan_is_deterministic_and_grid_independent() {
    let mut config = unit_config();
    config.scan = ScanConfig {
        plaquettes: vec![1, 2],
        layers: vec![1, 2],
        ansatze: vec![AnsatzKind::Gi, AnsatzKind::Zz],
        samples: 12,
        all_parameters: false,
    };
    let a = variance_scan(&config).unwrap();
    let b = variance_scan(&config).unwrap();
    assert_eq!(a.rows.len(), 8);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.variance, y.variance);
        assert!(x.variance > 0.0);
    }
    config.scan.plaquettes = vec![2];
    config.scan.ansatze = vec![AnsatzKind::Zz];
    let c = variance_scan(&config).unwrap();
    assert_eq!(c.rows.len(), 2);
    let cell = a.cell(2, 2, AnsatzKind::Zz).unwrap();
    assert_eq!(
        cell.variance,
        c.cell(2, 2, AnsatzKind::Zz).unwrap().variance
    );
    assert_eq!(cell.n_qubits, 13);
    config.charges = vec![[0, 0]];
    assert!(variance_scan(&config).is_err());
}

#[test]
fn string_breaking_on_one_plaquette_matches_dense_sectors() {
    let mut config = ExperimentConfig::new(1, 3.0, 5.0, 1.0);
    config.string_breaking.vqe = true;
    config.layers = 2;
    config.n_runs = 2;
    let table = string_breaking_scan(&config).unwrap();
    let params = config.params().unwrap();
    let vacuum = dense_sector_energy(1, &params, &[]);
    assert!((table.vacuum_energy - vacuum).abs() < 1e-8);
    assert_eq!(table.rows.len(), 3);
    let distances: Vec<usize> = table.rows.iter().map(|r| r.distance).collect();
    assert_eq!(distances, [1, 1, 2]);
    for r in &table.rows {
        let e = dense_sector_energy(1, &params, &[Site::new(0, 0), r.site]);
        assert!((r.energy - e).abs() < 1e-8, "{:?}", r.site);
        assert!((r.potential - (e - vacuum)).abs() < 1e-8);
        assert_eq!(r.site_z.len(), 4);
        assert_eq!(r.link_x.len(), 4);
        assert!(r.vqe_energy.unwrap() >= r.energy - 1e-9);
    }
    let d1 = table.average(1).unwrap();
    assert_eq!(d1.count, 2);
    assert!(
        (d1.mean_potential - 0.5 * (table.rows[0].potential + table.rows[1].potential)).abs()
            < 1e-12
    );
    assert!(table.vqe_vacuum_energy.unwrap() >= table.vacuum_energy - 1e-9);

    config.string_breaking.max_distance = Some(1);
    config.string_breaking.vqe = false;
    let short = string_breaking_scan(&config).unwrap();
    assert_eq!(short.rows.len(), 2);
    assert!(short.rows[0].vqe_energy.is_none());

    config.charges = vec![[1, 1]];
    assert!(string_breaking_scan(&config).is_err());
}

#[test]
fn fidelity_trace_runs_and_gi_control_stays_in_sector() {
    let mut config = unit_config();
    config.layers = 2;
    config.gradient.max_iter = 60;
    let report = fidelity_trace_experiment(&config).unwrap();
    assert_eq!(report.runs.len(), 3);
    let pi = &report.runs[0];
    assert_eq!((pi.ansatz, pi.init), (AnsatzKind::Zz, InitKind::Default));
    assert!((pi.initial_fidelity.unwrap() - 1.0).abs() < 1e-9);
    let gi = &report.runs[2];
    for r in &report.traces[2].1.records {
        assert!((r.gauss_fidelity.unwrap() - 1.0).abs() < 1e-9);
    }
    assert!(gi.final_energy >= report.sector_energy - 1e-9);
}

#[test]
fn config_serialization_round_trips_and_validates() {
    let mut config = unit_config();
    config.charges = vec![[0, 1], [1, 0]];
    config.shots = Some(1000);
    config.optimizer = OptimizerKind::Spsa;
    config.spsa.average_tail = 0.25;
    let text = serde_json::to_string(&config).unwrap();
    let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, config);
    assert!(back.validate_for(ExperimentKind::GroundState).is_ok());
    assert!(back.validate_for(ExperimentKind::StringBreaking).is_err());
    assert!(back.validate_for(ExperimentKind::FidelityTrace).is_err());

    let mut bad = unit_config();
    bad.spsa.average_tail = 1.5;
    assert!(bad.validate().is_err());
    let mut bad = unit_config();
    bad.scan.layers = vec![4];
    assert!(bad.validate().is_err());
    let mut bad = unit_config();
    bad.string_breaking.reference = [3, 0];
    assert!(bad.validate().is_err());
    let mut bad = unit_config();
    bad.layers = 0;
    assert!(bad.validate().is_err());
}

fn dat_points(text: &str) -> usize {
    text.lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .inspect(|l| {
            let cols: Vec<f64> = l.split(' ').map(|v| v.parse().unwrap()).collect();
            assert_eq!(cols.len(), 2);
        })
        .count()
}

#[test]
fn writers_produce_documented_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = unit_config();
    config.n_runs = 2;
    config.gradient.max_iter = 10;
    let gs = ground_state_experiment(&config).unwrap();
    let files = write_ground_state(dir.path(), &config, &gs).unwrap();
    assert_eq!(files.len(), 4);
    let csv = std::fs::read_to_string(dir.path().join("ground_state.csv")).unwrap();
    assert!(csv.starts_with("run_id,iteration,energy,gauss_fidelity,shots\n"));
    let dat = std::fs::read_to_string(dir.path().join("ground_state.dat")).unwrap();
    let longest = gs
        .traces
        .iter()
        .map(|(_, t)| t.records.len())
        .max()
        .unwrap();
    assert_eq!(dat_points(&dat), longest);
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("ground_state_summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["config"]["n_runs"], 2);
    assert_eq!(summary["report"]["runs"].as_array().unwrap().len(), 2);

    config.sweep = Some(SweepConfig {
        plaquettes: vec![1],
        layers: vec![1],
        shots: vec![],
    });
    let sweep = ground_state_sweep(&config).unwrap();
    write_sweep(dir.path(), &config, &sweep).unwrap();
    let dat = std::fs::read_to_string(dir.path().join("ground_state_sweep.dat")).unwrap();
    assert_eq!(dat_points(&dat), 1);

    config.sweep = None;
    config.scan.plaquettes = vec![1];
    config.scan.layers = vec![1];
    config.scan.samples = 3;
    let scan = variance_scan(&config).unwrap();
    write_variance_scan(dir.path(), &config, &scan).unwrap();
    let dat = std::fs::read_to_string(dir.path().join("variance_scan.dat")).unwrap();
    assert_eq!(dat_points(&dat), 2);

    let table = string_breaking_scan(&config).unwrap();
    write_string_breaking(dir.path(), &config, &table).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("string_breaking.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("col,leg,distance,energy,potential,vqe_energy,vqe_potential,z_0_0"));
    assert_eq!(header.split(',').count(), 7 + 4 + 4);
    assert_eq!(csv.lines().count(), 4);
    let avg = std::fs::read_to_string(dir.path().join("string_breaking_average.csv")).unwrap();
    assert_eq!(avg.lines().count(), 3);

    let fid = fidelity_trace_experiment(&config).unwrap();
    write_fidelity_trace(dir.path(), &config, &fid).unwrap();
    let dat = std::fs::read_to_string(dir.path().join("fidelity_trace.dat")).unwrap();
    assert_eq!(dat.matches("# ").count(), 3);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}
