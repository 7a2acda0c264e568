use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{
    ExperimentConfig, FidelityTraceReport, GroundStateReport, StaticPotentialTable, SweepReport,
    VarianceScanReport,
};
use crate::error::Result;
use crate::optimize::{write_theta_json, write_trace_csv};

/// Writes `path` through a temporary file in the same directory, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

/// `{"config": …, "report": …}`, so every summary carries what produced it.
fn write_summary<T: Serialize>(path: &Path, config: &ExperimentConfig, report: &T) -> Result<()> {
    write_json(
        path,
        &serde_json::json!({ "config": config, "report": report }),
    )
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}

fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(header)?;
        for r in rows {
            csv.write_record(r)?;
        }
        csv.flush()?;
        Ok(())
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Two-column blocks for gnuplot's `index`, separated by two blank lines.
/// `(x, y)` points of one plotted series.
type Series = Vec<(f64, f64)>;

fn dat_blocks(blocks: &[(String, Series)]) -> String {
    let mut out = String::new();
    for (i, (title, points)) in blocks.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# {title}");
        for (x, y) in points {
            let _ = writeln!(out, "{x} {y}");
        }
    }
    out
}

/// Per-run traces, parameter snapshots, a JSON summary, and a `.dat` of the
/// run-averaged energy per iteration (finished runs hold their last value).
pub fn write_ground_state(
    dir: &Path,
    config: &ExperimentConfig,
    report: &GroundStateReport,
) -> Result<Vec<PathBuf>> {
    let traces = report.trace_refs();
    let csv = dir.join("ground_state.csv");
    write_atomic(&csv, |w| write_trace_csv(w, &traces))?;
    let theta = dir.join("ground_state_theta.json");
    write_atomic(&theta, |w| write_theta_json(w, &traces))?;
    let summary = dir.join("ground_state_summary.json");
    write_summary(&summary, config, report)?;

    let longest = traces
        .iter()
        .map(|(_, t)| t.records.len())
        .max()
        .unwrap_or(0);
    let mut points = Vec::with_capacity(longest);
    for i in 0..longest {
        let total: f64 = traces
            .iter()
            .filter_map(|(_, t)| t.records.get(i).or(t.records.last()))
            .map(|r| r.energy)
            .sum();
        points.push((i as f64, total / traces.len() as f64));
    }
    let title = format!(
        "iteration mean_energy (sector energy {})",
        report.sector_energy
    );
    let dat = dir.join("ground_state.dat");
    write_text(&dat, &dat_blocks(&[(title, points)]))?;
    Ok(vec![csv, theta, summary, dat])
}

/// Grid table, JSON summary, and `.dat` blocks of mean relative error
/// against qubit count, one block per `(layers, shots)` series.
pub fn write_sweep(
    dir: &Path,
    config: &ExperimentConfig,
    report: &SweepReport,
) -> Result<Vec<PathBuf>> {
    let header: Vec<String> = [
        "plaquettes",
        "layers",
        "shots",
        "n_qubits",
        "n_params",
        "sector_energy",
        "completed",
        "mean_final_energy",
        "std_final_energy",
        "mean_relative_error",
        "std_relative_error",
        "best_relative_error",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.plaquettes.to_string(),
                r.layers.to_string(),
                opt(r.shots),
                r.n_qubits.to_string(),
                r.n_params.to_string(),
                r.sector_energy.to_string(),
                r.completed.to_string(),
                r.mean_final_energy.to_string(),
                r.std_final_energy.to_string(),
                r.mean_relative_error.to_string(),
                r.std_relative_error.to_string(),
                r.best_relative_error.to_string(),
            ]
        })
        .collect();
    let csv = dir.join("ground_state_sweep.csv");
    write_rows(&csv, &header, &rows)?;
    let summary = dir.join("ground_state_sweep_summary.json");
    write_summary(&summary, config, report)?;

    let mut series: Vec<((usize, Option<usize>), Series)> = Vec::new();
    for r in &report.rows {
        let key = (r.layers, r.shots);
        let point = (r.n_qubits as f64, r.mean_relative_error);
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push(point),
            None => series.push((key, vec![point])),
        }
    }
    let blocks: Vec<(String, Series)> = series
        .into_iter()
        .map(|((l, s), pts)| {
            let shots = s.map_or("exact".to_string(), |s| s.to_string());
            (
                format!("layers={l} shots={shots}: n_qubits mean_relative_error"),
                pts,
            )
        })
        .collect();
    let dat = dir.join("ground_state_sweep.dat");
    write_text(&dat, &dat_blocks(&blocks))?;
    Ok(vec![csv, summary, dat])
}

/// One row per placement with the site and link expectation values, the
/// per-distance averages, a JSON summary, and a `.dat` of averaged `V(d)`.
pub fn write_string_breaking(
    dir: &Path,
    config: &ExperimentConfig,
    table: &StaticPotentialTable,
) -> Result<Vec<PathBuf>> {
    let mut header: Vec<String> = [
        "col",
        "leg",
        "distance",
        "energy",
        "potential",
        "vqe_energy",
        "vqe_potential",
    ]
    .map(String::from)
    .to_vec();
    header.extend(table.sites.iter().map(|s| format!("z_{}_{}", s.col, s.leg)));
    header.extend(
        table
            .links
            .iter()
            .map(|[a, b]| format!("x_{}_{}_{}_{}", a.col, a.leg, b.col, b.leg)),
    );
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                r.site.col.to_string(),
                r.site.leg.to_string(),
                r.distance.to_string(),
                r.energy.to_string(),
                r.potential.to_string(),
                opt(r.vqe_energy),
                opt(r.vqe_potential),
            ];
            row.extend(r.site_z.iter().map(f64::to_string));
            row.extend(r.link_x.iter().map(f64::to_string));
            row
        })
        .collect();
    let csv = dir.join("string_breaking.csv");
    write_rows(&csv, &header, &rows)?;

    let avg_header: Vec<String> = ["distance", "count", "mean_potential", "mean_vqe_potential"]
        .map(String::from)
        .to_vec();
    let avg_rows: Vec<Vec<String>> = table
        .averages
        .iter()
        .map(|a| {
            vec![
                a.distance.to_string(),
                a.count.to_string(),
                a.mean_potential.to_string(),
                opt(a.mean_vqe_potential),
            ]
        })
        .collect();
    let avg = dir.join("string_breaking_average.csv");
    write_rows(&avg, &avg_header, &avg_rows)?;
    let summary = dir.join("string_breaking_summary.json");
    write_summary(&summary, config, table)?;

    let mut blocks = vec![(
        "distance mean_potential".to_string(),
        table
            .averages
            .iter()
            .map(|a| (a.distance as f64, a.mean_potential))
            .collect(),
    )];
    blocks.push((
        "distance potential (every placement)".to_string(),
        table
            .rows
            .iter()
            .map(|r| (r.distance as f64, r.potential))
            .collect(),
    ));
    let dat = dir.join("string_breaking.dat");
    write_text(&dat, &dat_blocks(&blocks))?;
    Ok(vec![csv, avg, summary, dat])
}

/// Variance table, JSON summary, and `.dat` blocks of variance against qubit
/// count, one block per `(ansatz, layers)` series.
pub fn write_variance_scan(
    dir: &Path,
    config: &ExperimentConfig,
    report: &VarianceScanReport,
) -> Result<Vec<PathBuf>> {
    let header: Vec<String> = [
        "plaquettes",
        "layers",
        "ansatz",
        "n_qubits",
        "n_params",
        "samples",
        "mean",
        "variance",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.plaquettes.to_string(),
                r.layers.to_string(),
                r.ansatz.name().to_string(),
                r.n_qubits.to_string(),
                r.n_params.to_string(),
                r.samples.to_string(),
                r.mean.to_string(),
                r.variance.to_string(),
            ]
        })
        .collect();
    let csv = dir.join("variance_scan.csv");
    write_rows(&csv, &header, &rows)?;
    let summary = dir.join("variance_scan_summary.json");
    write_summary(&summary, config, report)?;

    let mut series: Vec<((&str, usize), Series)> = Vec::new();
    for r in &report.rows {
        let key = (r.ansatz.name(), r.layers);
        let point = (r.n_qubits as f64, r.variance);
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push(point),
            None => series.push((key, vec![point])),
        }
    }
    let blocks: Vec<(String, Series)> = series
        .into_iter()
        .map(|((a, l), pts)| (format!("ansatz={a} layers={l}: n_qubits variance"), pts))
        .collect();
    let dat = dir.join("variance_scan.dat");
    write_text(&dat, &dat_blocks(&blocks))?;
    Ok(vec![csv, summary, dat])
}

/// Traces of the three runs (run ids as in the summary), a JSON summary, and
/// `.dat` blocks of Gauss fidelity per iteration.
pub fn write_fidelity_trace(
    dir: &Path,
    config: &ExperimentConfig,
    report: &FidelityTraceReport,
) -> Result<Vec<PathBuf>> {
    let traces = report.trace_refs();
    let csv = dir.join("fidelity_trace.csv");
    write_atomic(&csv, |w| write_trace_csv(w, &traces))?;
    let summary = dir.join("fidelity_trace_summary.json");
    write_summary(&summary, config, report)?;
    let blocks: Vec<(String, Series)> = report
        .runs
        .iter()
        .zip(&traces)
        .map(|(run, (_, t))| {
            let pts = t
                .records
                .iter()
                .filter_map(|r| r.gauss_fidelity.map(|f| (r.iteration as f64, f)))
                .collect();
            (format!("{}: iteration gauss_fidelity", run.label), pts)
        })
        .collect();
    let dat = dir.join("fidelity_trace.dat");
    write_text(&dat, &dat_blocks(&blocks))?;
    Ok(vec![csv, summary, dat])
}
