//! Driving a configured run from the initial slice to `tau_final`.

use super::{make_initial_data, Evolver, Grid, GridState, Observation, Scratch};
use crate::config::RunConfig;
use crate::energies::{rp_energy, standard_energy, EnergySpec};
use crate::error::{Error, Result};
use crate::foliation::{default_height, CompactMap};
use serde::{Deserialize, Serialize};

/// One diagnostic row, emitted every `cadence` in τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub tau: f64,
    /// `ψ` at each configured probe radius
    pub probe_psi: Vec<f64>,
    pub psi_scri: f64,
    pub u_psi_scri: f64,
    pub vpsi_scri: f64,
    pub r3source_scri: f64,
    /// `∫[g|UΨ|² + (1+h′)|VΨ|²]dρ`
    pub standard_energy: f64,
    /// `∫₀^τ lim r³N dτ′`, trapezoid over every time step
    pub source_integral: f64,
    /// `∫₀^τ |UΨ|² dτ′` at scri, trapezoid over every time step
    pub flux_integral: f64,
    /// one value per requested `(k, p)`
    pub energies: Vec<f64>,
}

/// Everything a run produces. On a numerical abort the rows written so far
/// are kept and `abort` holds the error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunArtifact {
    pub config: RunConfig,
    pub config_hash: String,
    pub dtau: f64,
    pub steps: usize,
    pub rows: Vec<DiagnosticRow>,
    pub initial: GridState,
    pub final_state: GridState,
    pub abort: Option<Error>,
}

impl RunArtifact {
    pub fn taus(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.tau).collect()
    }

    /// `(τ, ψ)` at probe `i`.
    pub fn probe_series(&self, i: usize) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.tau, r.probe_psi[i])).collect()
    }

    /// `(τ, E)` for energy request `i`.
    pub fn energy_series(&self, i: usize) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.tau, r.energies[i])).collect()
    }

    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }
}

/// Builds the discretization described by `cfg`.
pub fn build_evolver(cfg: &RunConfig) -> Result<Evolver> {
    let form = cfg.null_form.resolve()?.radial;
    let grid = Grid::new(cfg.n, CompactMap::new(cfg.scale)?, default_height(cfg.eta)?)?;
    Ok(Evolver::new(grid, form, cfg.dissipation).with_hyperbolicity_factor(cfg.tolerances.hyperbolicity))
}

fn row(
    ev: &Evolver,
    cfg: &RunConfig,
    specs: &[EnergySpec],
    st: &GridState,
    s: &mut Scratch,
) -> Result<DiagnosticRow> {
    let Observation {
        tau,
        probe_psi,
        psi_scri,
        u_psi_scri,
        vpsi_scri,
        r3source_scri,
    } = ev.observe(st, &cfg.probes, s)?;
    let energies = specs
        .iter()
        .map(|e| rp_energy(ev, st, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticRow {
        tau,
        probe_psi,
        psi_scri,
        u_psi_scri,
        vpsi_scri,
        r3source_scri,
        standard_energy: standard_energy(ev, st),
        source_integral: 0.0,
        flux_integral: 0.0,
        energies,
    })
}

/// Runs `cfg` to completion (or to the first numerical abort).
pub fn evolve(cfg: &RunConfig) -> Result<RunArtifact> {
    evolve_with(cfg, |_, _| {})
}

/// Like [`evolve`], calling `observer` on every diagnostic slice.
pub fn evolve_with<F: FnMut(&Evolver, &GridState)>(cfg: &RunConfig, mut observer: F) -> Result<RunArtifact> {
    cfg.validate()?;
    let ev = build_evolver(cfg)?;
    let specs = cfg
        .energies
        .iter()
        .map(|e| EnergySpec::new(e.k, e.p, cfg.eta))
        .collect::<Result<Vec<_>>>()?;
    let initial = make_initial_data(&cfg.data, &ev.grid)?;
    let per_row = (cfg.cadence / ev.max_dtau(cfg.cfl)).ceil().max(1.0) as usize;
    let dtau = cfg.cadence / per_row as f64;
    let n_rows = (cfg.tau_final / cfg.cadence).round() as usize;

    let mut ws = ev.workspace();
    let mut scratch = Scratch::new(ev.n());
    let mut st = initial.clone();
    let mut rows = Vec::with_capacity(n_rows + 1);
    let mut steps = 0;
    let mut abort = None;
    // running trapezoid sums of (r³N, |UΨ|²) up to the slice of `last`
    let mut acc = (0.0, 0.0);
    let mut last: Option<(f64, f64)> = None;
    match row(&ev, cfg, &specs, &st, &mut scratch) {
        Ok(r) => {
            observer(&ev, &st);
            rows.push(r)
        }
        Err(e) if e.is_numerical_abort() => abort = Some(e),
        Err(e) => return Err(e),
    }
    'outer: for k in 1..=n_rows {
        if abort.is_some() {
            break;
        }
        for _ in 0..per_row {
            match ev.step_in_place(&mut st, dtau, &mut ws) {
                Ok((src, u)) => {
                    let now = (src, u * u);
                    if let Some(prev) = last {
                        acc.0 += 0.5 * dtau * (prev.0 + now.0);
                        acc.1 += 0.5 * dtau * (prev.1 + now.1);
                    }
                    last = Some(now);
                }
                Err(e) => {
                    abort = Some(e);
                    break 'outer;
                }
            }
            steps += 1;
            st.tau = steps as f64 * dtau;
        }
        st.tau = k as f64 * cfg.cadence;
        match row(&ev, cfg, &specs, &st, &mut scratch) {
            Ok(mut r) => {
                if let Some(prev) = last {
                    r.source_integral = acc.0 + 0.5 * dtau * (prev.0 + r.r3source_scri);
                    r.flux_integral = acc.1 + 0.5 * dtau * (prev.1 + r.u_psi_scri * r.u_psi_scri);
                }
                observer(&ev, &st);
                rows.push(r)
            }
            Err(e) if e.is_numerical_abort() => {
                abort = Some(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RunArtifact {
        config_hash: cfg.hash(),
        config: cfg.clone(),
        dtau,
        steps,
        rows,
        initial,
        final_state: st,
        abort,
    })
}
