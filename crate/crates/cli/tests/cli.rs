use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use z2ladder::experiments::ExperimentKind;
use z2ladder::optimize::Mode;
use z2ladder_cli::{apply_override, validate_config, EXIT_CAPACITY, EXIT_CONFIG};

fn bin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_z2ladder"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("Z2LADDER_OUT")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn missing_mu_is_a_config_error_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &["ground-state", "--set", "J=1", "--set", "m=1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(stderr(&o).contains("`mu`"), "{}", stderr(&o));
}

#[test]
fn validation_rejects_bad_values() {
    let base = json!({"mu": 1.0, "J": 1.0, "m": 1.0});
    let with = |k: &str, v: Value| {
        let mut raw = base.clone();
        raw[k] = v;
        raw
    };
    assert!(validate_config(with("mu", json!(0.0)), None).is_err());
    assert!(validate_config(with("V", json!(-1.0)), None).is_err());
    assert!(validate_config(with("plaquettes", json!(0)), None).is_err());
    let mut off = with("plaquettes", json!(3));
    off["charges"] = json!([[5, 0]]);
    let e = validate_config(off, None).unwrap_err();
    assert_eq!(e.exit_code(), EXIT_CONFIG);
    assert!(e.to_string().contains("(5, 0)"), "{e}");
    assert!(validate_config(with("charges", json!([[0, 0], [0, 0]])), None).is_err());
    assert!(validate_config(with("unknown_key", json!(1)), None).is_err());
    let mut spsa = base.clone();
    spsa["spsa"] = json!({"seed": 3});
    assert!(validate_config(spsa, None).is_err());
    assert!(validate_config(with("shots", json!(100)), None).is_err());
    let sb = with("charges", json!([[1, 0]]));
    assert!(validate_config(sb.clone(), None).is_ok());
    assert!(validate_config(sb, Some(ExperimentKind::StringBreaking)).is_err());
    let kind = with("experiment", json!("variance_scan"));
    assert!(validate_config(kind, Some(ExperimentKind::GroundState)).is_err());
}

#[test]
fn defaults_are_filled() {
    let c = validate_config(json!({"mu": 2.0, "J": 3.0, "m": 1.0}), None).unwrap();
    assert_eq!(c.shots, None);
    assert_eq!(c.mode(7), Mode::Exact);
    assert_eq!((c.plaquettes, c.layers, c.n_runs, c.v), (1, 1, 1, 0.0));
    assert_eq!(c.scan.samples, 100);
    assert_eq!(c.gradient.max_iter, 500);
    assert_eq!(c.spsa.max_iter, 300);
}

#[test]
fn overrides_parse_json_and_nest() {
    let mut raw = json!({"mu": 1.0});
    apply_override(&mut raw, "J=5").unwrap();
    apply_override(&mut raw, "ansatz=zz").unwrap();
    apply_override(&mut raw, "spsa.max_iter=10").unwrap();
    apply_override(&mut raw, "charges=[[0,0],[1,1]]").unwrap();
    assert_eq!(raw["J"], json!(5));
    assert_eq!(raw["ansatz"], json!("zz"));
    assert_eq!(raw["spsa"]["max_iter"], json!(10));
    assert_eq!(raw["charges"], json!([[0, 0], [1, 1]]));
    assert!(apply_override(&mut raw, "no_equals").is_err());
    assert!(apply_override(&mut raw, "mu.x=1").is_err());
}

#[test]
fn repeated_runs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "ground-state",
        "--set",
        "mu=2",
        "--set",
        "J=3",
        "--set",
        "m=1",
        "--set",
        "layers=2",
        "--set",
        "n_runs=3",
        "--seed",
        "11",
    ];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(bin(&args, &a).status.success());
    assert!(bin(&args, &b).status.success());
    for f in [
        "ground_state.csv",
        "ground_state_theta.json",
        "ground_state_summary.json",
    ] {
        let x = std::fs::read(a.join(f)).unwrap();
        let y = std::fs::read(b.join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f} differs");
    }
    let echo: Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("config.json")).unwrap()).unwrap();
    assert_eq!(echo["seed"], json!(11));
    assert!(validate_config(echo, Some(ExperimentKind::GroundState)).is_ok());
}

#[test]
fn config_file_and_echo_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"mu": 1, "J": 1, "m": 1, "ansatz": "zz", "layers": 2}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = bin(
        &[
            "fidelity-trace",
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "gradient.max_iter=20",
        ],
        &out,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("fidelity_trace.csv")).unwrap();
    assert!(csv.starts_with("run_id,iteration,energy,gauss_fidelity,shots\n"));
    for id in 0..3 {
        assert!(csv.lines().any(|l| l.starts_with(&format!("{id},0,"))));
    }
    let echo = std::fs::read_to_string(out.join("config.json")).unwrap();
    let echo: Value = serde_json::from_str(&echo).unwrap();
    assert_eq!(echo["gradient"]["max_iter"], json!(20));
}

#[test]
fn exact_prints_sector_and_vacuum_energies() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &[
            "exact",
            "--set",
            "mu=2",
            "--set",
            "J=5",
            "--set",
            "m=1",
            "--set",
            "charges=[[0,0],[1,0]]",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split('=').nth(1).unwrap().trim().parse().unwrap()
    };
    let sector = value("sector_energy");
    let vacuum = value("vacuum_energy");
    assert!(
        sector > vacuum,
        "a charge pair costs energy: {sector} vs {vacuum}"
    );
    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("exact.json")).unwrap())
            .unwrap();
    assert_eq!(json["sector_energy"].as_f64(), Some(sector));
}

#[test]
fn oversized_lattice_is_a_capacity_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &[
            "exact",
            "--set",
            "mu=1",
            "--set",
            "J=1",
            "--set",
            "m=1",
            "--set",
            "plaquettes=4",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(EXIT_CAPACITY), "{}", stderr(&o));
}

#[test]
fn variance_scan_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &[
            "variance-scan",
            "--set",
            "mu=1",
            "--set",
            "J=1",
            "--set",
            "m=1",
            "--set",
            "scan={\"plaquettes\":[1,2],\"layers\":[1],\"samples\":5}",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("variance_scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "plaquettes,layers,ansatz,n_qubits,n_params,samples,mean,variance"
    );
    assert_eq!(lines.len(), 1 + 2 * 2);
    let dat = std::fs::read_to_string(dir.path().join("variance_scan.dat")).unwrap();
    assert_eq!(dat.matches("# ansatz=").count(), 2);
}

#[test]
fn dumps_layout_and_hamiltonian() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin(&["dump-layout", "--set", "plaquettes=2"], dir.path())
        .status
        .success());
    let layout: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("layout.json")).unwrap())
            .unwrap();
    assert!(!layout.is_null());
    let o = bin(
        &[
            "dump-hamiltonian",
            "--set",
            "mu=1",
            "--set",
            "J=1",
            "--set",
            "m=1",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("hamiltonian.txt")).unwrap();
    assert!(text.starts_with("# 8 qubits"));
    assert_eq!(text.matches("# (").count(), 4);
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let parsed = z2ladder::PauliSum::parse(&body).unwrap();
    assert_eq!(parsed.n_qubits(), 8);
}
