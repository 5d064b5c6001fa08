//! Deterministic, atomic output files.

use crate::CliError;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use tailwave_core::evolver::Evolver;
use tailwave_core::{GridState, RunArtifact};

/// Version of the diagnostics CSV layout.
pub const CSV_VERSION: u32 = 1;

/// Provenance of one invocation, embedded in every summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub mode: String,
    pub output_dir: String,
    pub tool_version: String,
    pub csv_version: u32,
    pub started_unix: u64,
    pub wall_seconds: f64,
}

impl RunManifest {
    pub fn new(mode: &str, config_hash: String, out: &Path, started: std::time::SystemTime) -> Self {
        Self {
            config_hash,
            mode: mode.to_string(),
            output_dir: out.display().to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            csv_version: CSV_VERSION,
            started_unix: started
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            wall_seconds: started.elapsed().map_or(0.0, |d| d.as_secs_f64()),
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_vec_pretty(value).expect("summaries serialize");
    text.push(b'\n');
    write_atomic(path, &text)
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn num(x: f64) -> String {
    // shortest round-trip form: identical runs give identical bytes
    format!("{x:?}")
}

/// One row per (slice, probe): `tau, probe_rho, psi, Psi_scri, VPsi_scri,
/// r3source_scri`, then `(k, p, value)` per requested energy.
pub fn diagnostics_csv(run: &RunArtifact) -> Vec<u8> {
    let cfg = &run.config;
    let mut header: Vec<String> = ["tau", "probe_rho", "psi", "Psi_scri", "VPsi_scri", "r3source_scri"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for i in 0..cfg.energies.len() {
        header.extend([format!("E{i}_k"), format!("E{i}_p"), format!("E{i}_value")]);
    }
    let rows = run.rows.iter().flat_map(|r| {
        cfg.probes.iter().zip(&r.probe_psi).map(move |(rho, psi)| {
            let mut rec = vec![
                num(r.tau),
                num(*rho),
                num(*psi),
                num(r.psi_scri),
                num(r.vpsi_scri),
                num(r.r3source_scri),
            ];
            for (e, v) in cfg.energies.iter().zip(&r.energies) {
                rec.extend([e.k.to_string(), num(e.p), num(*v)]);
            }
            rec
        })
    });
    csv_bytes(&header, rows)
}

/// `sigma, rho, Psi, Pi` on every node of a slice.
pub fn snapshot_csv(ev: &Evolver, state: &GridState) -> Vec<u8> {
    let header: Vec<String> = ["sigma", "rho", "Psi", "Pi"].iter().map(|s| s.to_string()).collect();
    let g = &ev.grid;
    let rows = (0..=g.n).map(|j| {
        vec![
            num(g.sigma[j]),
            if j == g.n { "inf".to_string() } else { num(g.rho[j]) },
            num(state.psi[j]),
            num(state.pi[j]),
        ]
    });
    csv_bytes(&header, rows)
}
