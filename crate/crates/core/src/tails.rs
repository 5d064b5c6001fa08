//! Late-time asymptotics: power indices, the scri amplitude `a(u) = 2uΨ_scri`,
//! and the bookkeeping `c_total = c_init + c_scri`.

use crate::config::{RunConfig, Tolerances};
use crate::energies::{linear_fit, DecayFit, MIN_FIT_SAMPLES};
use crate::error::{Error, Result};
use crate::evolver::{build_evolver, evolve, Evolver, GridState, InitialDataSpec, RunArtifact};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// One sample of the local power index `d ln|ψ| / d ln τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpiSample {
    pub tau: f64,
    /// `None` when masked
    pub lpi: Option<f64>,
    /// the stencil straddles a sign change of `ψ`
    pub sign_change: bool,
}

/// Centered differences of `ln|ψ|` in `ln τ`. Samples whose three-point
/// stencil touches `|ψ| ≤ noise_floor` or a sign change are masked.
pub fn local_power_index(series: &[(f64, f64)], noise_floor: f64) -> Vec<LpiSample> {
    series
        .windows(3)
        .filter(|w| w[0].0 > 0.0)
        .map(|w| {
            let tau = w[1].0;
            let sign_change = !(w.iter().all(|p| p.1 > 0.0) || w.iter().all(|p| p.1 < 0.0));
            let quiet = w.iter().any(|p| !(p.1.abs() > noise_floor));
            let lpi = (!sign_change && !quiet)
                .then(|| (w[2].1.abs().ln() - w[0].1.abs().ln()) / (w[2].0.ln() - w[0].0.ln()));
            LpiSample { tau, lpi, sign_change }
        })
        .collect()
}

/// Power-law fit of a probe series over `window`, dropping samples at or below
/// the noise floor. Fails when fewer than [`MIN_FIT_SAMPLES`] remain or `ψ`
/// changes sign inside the window.
pub fn fit_power_index(series: &[(f64, f64)], window: (f64, f64), noise_floor: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, v)| t >= window.0 && t <= window.1 && t > 0.0 && v.abs() > noise_floor)
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "{} samples above the noise floor {noise_floor:e} in [{}, {}]",
            pts.len(),
            window.0,
            window.1
        )));
    }
    if let Some(w) = pts.windows(2).find(|w| w[0].1.signum() != w[1].1.signum()) {
        return Err(Error::Fit(format!("sign change between tau = {} and {}", w[0].0, w[1].0)));
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(t, v)| (t.ln(), v.abs().ln())).collect();
    let (slope, intercept, stderr) = linear_fit(&xy);
    Ok(DecayFit {
        slope,
        stderr,
        intercept,
        samples: pts.len(),
        window,
    })
}

/// `(u, 2uΨ_scri)` with `u = τ − L`; samples with `u ≤ 0` are dropped.
pub fn scri_amplitude(series: &[(f64, f64)], scri_offset: f64) -> Vec<(f64, f64)> {
    series
        .iter()
        .map(|&(tau, psi)| (tau - scri_offset, psi))
        .filter(|&(u, _)| u > 0.0)
        .map(|(u, psi)| (u, 2.0 * u * psi))
        .collect()
}

/// Least squares `y ≈ Σ cₖ colₖ`; returns coefficients and standard errors.
fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = y.len();
    let k = cols.len();
    // unit-norm columns keep the normal matrix well conditioned
    let scale: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE))
        .collect();
    let a = DMatrix::from_fn(m, k, |i, j| cols[j][i] / scale[j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let c_s = svd.solve(&b, 1e-14).expect("both singular-vector sets computed");
    let resid = (&a * &c_s - &b).norm_squared();
    let dof = (m as f64 - k as f64).max(1.0);
    let cov = (a.transpose() * &a)
        .try_inverse()
        .unwrap_or_else(|| DMatrix::from_element(k, k, f64::NAN))
        * (resid / dof);
    let coef = (0..k).map(|j| c_s[j] / scale[j]).collect();
    let err = (0..k).map(|j| cov[(j, j)].max(0.0).sqrt() / scale[j]).collect();
    (coef, err)
}

/// Fit of the scri amplitude to `c·u/(u − s) [+ e·u^{−δ_id}]`, i.e. the
/// `1/u` tail `Ψ_scri ≈ c/(2(u − s))` with a fitted retarded-time origin `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriFit {
    /// limit of `a(u)`
    pub c_total: f64,
    pub stderr: f64,
    /// coefficient of `u^{−δ_id}` for non-compact data
    pub remainder: Option<f64>,
    /// `s`: shift of the retarded-time origin
    pub origin_shift: f64,
    /// `(max − min)/|c|` of `2(u − s)Ψ_scri [− e·u^{−δ_id}]` over the window
    pub drift: f64,
    /// slope of that series against `ln u`, relative to `|c|`
    pub drift_slope: f64,
    /// `|a(u_end) − c| / |c|` for the unshifted amplitude
    pub end_gap: f64,
    pub samples: usize,
    pub window: (f64, f64),
}

/// Fits the scri amplitude of `(τ, Ψ_scri)` samples inside the τ-`window`.
///
/// `a = c + s·a/u [+ e·u^{−δ_id}]` is linear in `(c, s, e)`.
pub fn fit_scri_amplitude(
    series: &[(f64, f64)],
    scri_offset: f64,
    window: (f64, f64),
    remainder_exponent: Option<f64>,
    amplitude_floor: f64,
) -> Result<ScriFit> {
    let inside: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    let amp = scri_amplitude(&inside, scri_offset);
    if amp.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "{} scri samples in [{}, {}], need at least {MIN_FIT_SAMPLES}",
            amp.len(),
            window.0,
            window.1
        )));
    }
    let a: Vec<f64> = amp.iter().map(|p| p.1).collect();
    let mut cols = vec![vec![1.0; amp.len()], amp.iter().map(|&(u, a)| a / u).collect()];
    if let Some(delta) = remainder_exponent {
        cols.push(amp.iter().map(|&(u, _)| u.powf(-delta)).collect());
    }
    let (coef, err) = least_squares(&cols, &a);
    let c = coef[0];
    let origin_shift = coef[1];
    let norm = c.abs().max(amplitude_floor);
    let remainder = coef.get(2).copied();
    // what the model says should be exactly c
    let shifted: Vec<(f64, f64)> = amp
        .iter()
        .map(|&(u, a)| {
            let rem = match (remainder, remainder_exponent) {
                (Some(e), Some(delta)) => e * u.powf(-delta),
                _ => 0.0,
            };
            (u, a * (u - origin_shift) / u - rem)
        })
        .collect();
    let (lo, hi) = shifted
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let log_xy: Vec<(f64, f64)> = shifted.iter().map(|&(u, a)| (u.ln(), a)).collect();
    let (slope, _, _) = linear_fit(&log_xy);
    Ok(ScriFit {
        c_total: c,
        stderr: err[0],
        remainder,
        origin_shift,
        drift: (hi - lo) / norm,
        drift_slope: slope / norm,
        end_gap: (a[a.len() - 1] - c).abs() / norm,
        samples: amp.len(),
        window,
    })
}

/// `c_scri = −2∫ lim r³N dτ` with a power-law completion beyond the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriIntegral {
    pub value: f64,
    /// size of the completion, used as the truncation uncertainty
    pub truncation: f64,
    /// fitted decay exponent of the integrand over the final decade
    pub integrand_slope: Option<f64>,
    pub warning: Option<String>,
}

/// Integrand decay slower than this gets a warning.
const SLOW_INTEGRAND: f64 = -1.5;

/// Accumulates `c_scri` from the per-step integral recorded in `run`.
pub fn accumulate_c_scri(run: &RunArtifact) -> Result<ScriIntegral> {
    let last = run
        .rows
        .last()
        .ok_or_else(|| Error::MissingSeries("diagnostic rows".into()))?;
    let main = -2.0 * last.source_integral;
    let t_end = last.tau;
    let series: Vec<(f64, f64)> = run.rows.iter().map(|r| (r.tau, r.r3source_scri)).collect();
    if series.iter().all(|p| p.1 == 0.0) {
        return Ok(ScriIntegral {
            value: main,
            truncation: 0.0,
            integrand_slope: None,
            warning: None,
        });
    }
    let window = (0.1 * t_end, t_end);
    let fit = fit_power_index(&series, window, f64::MIN_POSITIVE);
    let s_end = last.r3source_scri;
    Ok(match fit {
        Ok(f) if f.slope < -1.0 => {
            // ∫_T^∞ S_T (τ/T)^k dτ = S_T T / (−k − 1)
            let tail = -2.0 * s_end * t_end / (-f.slope - 1.0);
            ScriIntegral {
                value: main + tail,
                truncation: tail.abs(),
                integrand_slope: Some(f.slope),
                warning: (f.slope > SLOW_INTEGRAND)
                    .then(|| format!("scri source decays only like tau^{:.2}", f.slope)),
            }
        }
        Ok(f) => ScriIntegral {
            value: main,
            truncation: f64::INFINITY,
            integrand_slope: Some(f.slope),
            warning: Some(format!("scri source decays like tau^{:.2}; integral may diverge", f.slope)),
        },
        Err(e) => ScriIntegral {
            value: main,
            // oscillating or noise-level integrand: bound the rest by its last size
            truncation: 2.0 * s_end.abs() * t_end,
            integrand_slope: None,
            warning: Some(format!("no power-law fit of the scri source: {e}")),
        },
    })
}

/// `(c_init, D)` from `v²VΨ ≈ c_init + D·v^{−δ_id}` over the outer decade of
/// the initial slice; `(0, 0)` for compact data.
pub fn fit_c_init(ev: &Evolver, state: &GridState, data: &InitialDataSpec) -> (f64, f64) {
    let Some(delta) = data.remainder_exponent() else {
        return (0.0, 0.0);
    };
    let g = &ev.grid;
    let rho_max = g.rho[g.n - 1];
    let (v, y): (Vec<f64>, Vec<f64>) = ev
        .v2_vpsi_profile(state)
        .into_iter()
        .filter(|&(rho, _)| rho >= 0.1 * rho_max)
        .map(|(rho, y)| (state.tau + 2.0 * rho - g.height.rho_minus_h(rho), y))
        .unzip();
    let cols = [vec![1.0; v.len()], v.iter().map(|x| x.powf(-delta)).collect()];
    let (coef, _) = least_squares(&cols, &y);
    (coef[0], coef[1])
}

/// Expected late-time behaviour at a fixed radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictedDecay {
    /// no polynomial tail (linear or exactly linearizable equation)
    NoTail,
    /// `ψ(τ, ρ*) ~ τ^exponent`
    Power { exponent: f64 },
}

impl PredictedDecay {
    pub fn for_run(cfg: &RunConfig) -> Result<Self> {
        let form = cfg.null_form.resolve()?.radial;
        let c_init = cfg.data.c_init();
        Ok(if c_init != 0.0 || form.tail_coefficient().abs() > 1e-12 {
            PredictedDecay::Power { exponent: -2.0 }
        } else if form.is_semilinear() {
            PredictedDecay::NoTail
        } else {
            PredictedDecay::Power { exponent: -3.0 }
        })
    }
}

/// Power-index diagnostics of one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTail {
    pub rho: f64,
    pub lpi: Vec<LpiSample>,
    pub fit: Option<DecayFit>,
    pub fit_error: Option<String>,
    pub masked: usize,
    pub sign_changes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub config_hash: String,
    pub window: (f64, f64),
    pub probes: Vec<ProbeTail>,
    /// `(u, a(u))` over the whole run
    pub amplitude: Vec<(f64, f64)>,
    pub scri_fit: Option<ScriFit>,
    pub c_init: f64,
    pub c_init_remainder: f64,
    pub c_scri: ScriIntegral,
    pub c_total_predicted: f64,
    pub c_total_measured: f64,
    pub mismatch: f64,
    pub predicted: PredictedDecay,
    pub tail_coefficient: f64,
    pub tolerances: Tolerances,
    pub mismatch_ok: bool,
    pub lpi_ok: bool,
    /// flagged, not part of `passed`
    pub drift_ok: bool,
    pub complete: bool,
    pub notes: Vec<String>,
    pub passed: bool,
}

/// `|measured − predicted| / max(|predicted|, floor)`.
pub fn mismatch(measured: f64, predicted: f64, floor: f64) -> f64 {
    (measured - predicted).abs() / predicted.abs().max(floor)
}

/// Assembles the tail report of a finished run.
pub fn verify_prediction(run: &RunArtifact) -> Result<TailReport> {
    let cfg = &run.config;
    let tol = cfg.tolerances;
    let ev = build_evolver(cfg)?;
    let window = cfg.fit_window();
    let predicted = PredictedDecay::for_run(cfg)?;
    let mut notes = Vec::new();
    let mut complete = run.completed();
    if let Some(e) = &run.abort {
        notes.push(format!("run aborted: {e}"));
    }

    let probes: Vec<ProbeTail> = cfg
        .probes
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let series = run.probe_series(i);
            let lpi = local_power_index(&series, tol.noise_floor);
            let (fit, fit_error) = match fit_power_index(&series, window, tol.noise_floor) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ProbeTail {
                rho,
                masked: lpi.iter().filter(|s| s.lpi.is_none()).count(),
                sign_changes: lpi.iter().filter(|s| s.sign_change).count(),
                lpi,
                fit,
                fit_error,
            }
        })
        .collect();

    let scri: Vec<(f64, f64)> = run.rows.iter().map(|r| (r.tau, r.psi_scri)).collect();
    let offset = ev.grid.height.scri_offset();
    let amplitude = scri_amplitude(&scri, offset);
    let scri_fit = match fit_scri_amplitude(
        &scri,
        offset,
        window,
        cfg.data.remainder_exponent(),
        tol.amplitude_floor,
    ) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("scri amplitude: {e}"));
            complete = false;
            None
        }
    };
    let (c_init, c_init_remainder) = fit_c_init(&ev, &run.initial, &cfg.data);
    let c_scri = match accumulate_c_scri(run) {
        Ok(c) => c,
        Err(e) => {
            complete = false;
            notes.push(e.to_string());
            ScriIntegral {
                value: f64::NAN,
                truncation: f64::NAN,
                integrand_slope: None,
                warning: None,
            }
        }
    };
    if let Some(w) = &c_scri.warning {
        notes.push(w.clone());
    }
    let c_total_predicted = c_init + c_scri.value;
    let c_total_measured = scri_fit.as_ref().map_or(f64::NAN, |f| f.c_total);
    let mismatch = mismatch(c_total_measured, c_total_predicted, tol.amplitude_floor);
    let mismatch_ok = mismatch < tol.mismatch;

    let lpi_ok = match predicted {
        PredictedDecay::Power { exponent } => {
            !probes.is_empty()
                && probes
                    .iter()
                    .all(|p| p.fit.is_some_and(|f| (f.slope - exponent).abs() < tol.lpi))
        }
        // either nothing left above the floor, or faster than any polynomial tail
        PredictedDecay::NoTail => probes.iter().all(|p| p.fit.is_none_or(|f| f.slope <= -3.0)),
    };
    let drift_ok = scri_fit.as_ref().is_some_and(|f| {
        f.drift < tol.drift || f.c_total.abs() <= tol.amplitude_floor
    });
    if !drift_ok {
        notes.push("scri amplitude has not settled over the fit window".into());
    }
    Ok(TailReport {
        config_hash: run.config_hash.clone(),
        window,
        probes,
        amplitude,
        scri_fit,
        c_init,
        c_init_remainder,
        c_scri,
        c_total_predicted,
        c_total_measured,
        mismatch,
        predicted,
        tail_coefficient: ev.form().tail_coefficient(),
        tolerances: tol,
        mismatch_ok,
        lpi_ok,
        drift_ok,
        passed: complete && mismatch_ok && lpi_ok,
        complete,
        notes,
    })
}

/// One run of the sensitivity experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRun {
    pub c_init: f64,
    pub c_scri: f64,
    pub c_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub base: SensitivityRun,
    pub perturbed: Vec<SensitivityRun>,
    /// `Δc_total/Δc_init` per perturbation
    pub slopes: Vec<f64>,
    /// `Δc_scri` per perturbation
    pub c_scri_shifts: Vec<f64>,
}

impl SensitivityReport {
    pub fn slopes_within(&self, lo: f64, hi: f64) -> bool {
        self.slopes.iter().all(|s| *s > lo && *s < hi)
    }
}

fn with_c_init(cfg: &RunConfig, c: f64) -> RunConfig {
    let mut out = cfg.clone();
    if let InitialDataSpec::NoncompactTail { c_init, .. } = &mut out.data {
        *c_init = c;
    }
    out
}

fn measure(cfg: &RunConfig) -> Result<SensitivityRun> {
    let run = evolve(cfg)?;
    if let Some(e) = run.abort {
        return Err(e);
    }
    let report = verify_prediction(&run)?;
    Ok(SensitivityRun {
        c_init: report.c_init,
        c_scri: report.c_scri.value,
        c_total: report.c_total_measured,
    })
}

/// Finite-difference response of the measured `c_total` to shifts of
/// `c_init` by each of `perturbations`. Runs execute on separate threads.
pub fn sensitivity(base: &RunConfig, perturbations: &[f64]) -> Result<SensitivityReport> {
    let InitialDataSpec::NoncompactTail { c_init, .. } = base.data else {
        return Err(Error::Parameter("sensitivity needs noncompact_tail data".into()));
    };
    if perturbations.len() < 2 || perturbations.iter().any(|d| *d == 0.0 || !d.is_finite()) {
        return Err(Error::Parameter(
            "sensitivity needs at least two nonzero finite perturbations".into(),
        ));
    }
    let cfgs: Vec<RunConfig> = std::iter::once(c_init)
        .chain(perturbations.iter().map(|d| c_init + d))
        .map(|c| with_c_init(base, c))
        .collect();
    let results: Vec<Result<SensitivityRun>> = std::thread::scope(|s| {
        let handles: Vec<_> = cfgs.iter().map(|c| s.spawn(move || measure(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sensitivity run panicked"))
            .collect()
    });
    let mut runs = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter();
    let base_run = runs.next().expect("base run present");
    let perturbed: Vec<SensitivityRun> = runs.collect();
    let slopes = perturbed
        .iter()
        .map(|r| (r.c_total - base_run.c_total) / (r.c_init - base_run.c_init))
        .collect();
    let c_scri_shifts = perturbed.iter().map(|r| r.c_scri - base_run.c_scri).collect();
    Ok(SensitivityReport {
        base: base_run,
        perturbed,
        slopes,
        c_scri_shifts,
    })
}
