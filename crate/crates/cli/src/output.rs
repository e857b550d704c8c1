use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use qfall::experiments::{ExperimentReport, Snapshots};

use crate::config::SnapshotFormat;

/// Run manifest written next to the tables. Only this file carries the
/// wall-clock timestamp, so the CSV tables stay byte-identical across reruns.
pub fn run_manifest(
    report: &ExperimentReport,
    defaults: &BTreeMap<String, String>,
    warnings: &[String],
    files: &[PathBuf],
) -> Value {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let m = &report.manifest;
    json!({
        "experiment": report.experiment,
        "config_digest": m.config_digest,
        "unit": m.unit,
        "solver": m.solver,
        "tool_version": m.code_version,
        "timestamp_unix": timestamp,
        "threads": m.threads,
        "defaults": defaults,
        "warnings": warnings,
        "flags": report.flags,
        "values": report.values,
        "fits": report.fits,
        "distances": report.distances,
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    })
}

/// `t,z,re,im` rows for every stored field of a run.
pub fn snapshots_csv(s: &Snapshots, config_digest: &str) -> String {
    let mut out = format!("# config_digest={config_digest}\nt,z,re,im\n");
    for (t, field) in s.times.iter().zip(&s.fields) {
        for (j, a) in field.amplitudes().iter().enumerate() {
            out.push_str(&format!("{t},{},{},{}\n", field.grid().point(j), a.re, a.im));
        }
    }
    out
}

/// Little-endian `f64` quadruples `{t, z, re, im}`, no header.
pub fn snapshots_binary(s: &Snapshots) -> Vec<u8> {
    let mut out = Vec::new();
    for (t, field) in s.times.iter().zip(&s.fields) {
        for (j, a) in field.amplitudes().iter().enumerate() {
            for v in [*t, field.grid().point(j), a.re, a.im] {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

/// Writes tables, snapshots and the manifest; returns every path written.
pub fn write_report(
    report: &ExperimentReport,
    dir: &Path,
    format: SnapshotFormat,
    defaults: &BTreeMap<String, String>,
    warnings: &[String],
) -> io::Result<Vec<PathBuf>> {
    let mut files = report.write_tables(dir)?;
    let digest = &report.manifest.config_digest;
    let exp = &report.experiment;
    for s in &report.snapshots {
        let (name, body) = match format {
            SnapshotFormat::Csv => (
                format!("{exp}_snapshots-{}_{digest}.csv", s.label),
                snapshots_csv(s, digest).into_bytes(),
            ),
            SnapshotFormat::Binary => (format!("{exp}_snapshots-{}_{digest}.bin", s.label), snapshots_binary(s)),
        };
        let path = dir.join(name);
        fs::write(&path, body)?;
        files.push(path);
    }
    let path = dir.join(format!("{exp}_{digest}.json"));
    files.push(path.clone());
    let manifest = run_manifest(report, defaults, warnings, &files);
    let mut f = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n")?;
    Ok(files)
}

/// Human-readable summary printed after a run.
pub fn summary(report: &ExperimentReport) -> String {
    let mut out = format!(
        "experiment {} (config digest {})\n",
        report.experiment, report.manifest.config_digest
    );
    for r in &report.records {
        out.push_str(&format!(
            "  {:<24} T_ehrenfest={} sigma_full={} sigma_asymptotic={} epsilon={}",
            r.label, r.t_ehrenfest, r.sigma_full, r.sigma_asymptotic, r.epsilon
        ));
        if let Some(c) = &r.current {
            out.push_str(&format!(" current_mean={} current_std={}", c.mean_t, c.std_t));
        }
        out.push('\n');
    }
    for d in &report.distances {
        out.push_str(&format!(
            "  distance {} vs {}: L1={:e} KS={:e}\n",
            d.first, d.second, d.distance.l1, d.distance.ks
        ));
    }
    for f in &report.fits {
        out.push_str(&format!(
            "  fit {}: exponent={} stderr={:e} ({} points)\n",
            f.name, f.exponent, f.stderr, f.points
        ));
    }
    for (k, v) in &report.values {
        out.push_str(&format!("  {k} = {v}\n"));
    }
    for (k, v) in &report.flags {
        out.push_str(&format!("  {k}: {v}\n"));
    }
    out
}
