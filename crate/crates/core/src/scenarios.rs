//! Named verification scenarios: each runs a small experiment and reports
//! one [`Check`] per acceptance criterion.
//!
//! A part may carry a `known_limitation`: the target is checked and reported
//! as failing, but the failure is understood (see the README) and does not
//! count as a regression.

use crate::config::{EnergyRequest, NullFormSpec, RunConfig};
use crate::energies::fit_decay_rate;
use crate::error::{Error, Result};
use crate::evolver::{evolve, evolve_with, InitialDataSpec, Velocity};
use crate::nullform::{classify, generators, validate_null, with_injected, Family, NullFormTensor};
use crate::oracle::{
    exact_radiation_field, kirchhoff_eval, semilinear_transform, ModelSource, ProfileFunction, RadialSource,
};
use crate::tails::{local_power_index, sensitivity, verify_prediction, TailReport};
use crate::RunArtifact;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Scenario names in criterion order.
pub const SCENARIOS: &[&str] = &[
    "linear_convergence",
    "linear_huygens",
    "generic_tail",
    "coefficient_identity",
    "p2_faster_decay",
    "semilinear_decay",
    "energy_decay",
    "sensitivity",
    "null_algebra",
    "kirchhoff",
];

/// One measured target inside a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub label: String,
    pub passed: bool,
    pub detail: String,
    /// why this target is not reachable, when that is understood
    pub known_limitation: Option<String>,
}

impl Part {
    fn new(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            passed,
            detail: detail.into(),
            known_limitation: None,
        }
    }

    fn limited(mut self, why: &str) -> Self {
        self.known_limitation = Some(why.to_string());
        self
    }

    fn failed(label: impl Into<String>, e: &Error) -> Self {
        Self::new(label, false, format!("error: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: usize,
    pub name: String,
    pub parts: Vec<Part>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.parts.iter().all(|p| p.passed)
    }

    /// Failing parts without an understood cause.
    pub fn regressions(&self) -> Vec<&Part> {
        self.parts
            .iter()
            .filter(|p| !p.passed && p.known_limitation.is_none())
            .collect()
    }

    /// `PASS|FAIL <criterion> <name>: part; part; …`
    pub fn line(&self) -> String {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                let mark = match (p.passed, &p.known_limitation) {
                    (true, _) => "ok".to_string(),
                    (false, None) => "FAIL".to_string(),
                    (false, Some(why)) => format!("FAIL, known: {why}"),
                };
                format!("{} {} [{mark}]", p.label, p.detail)
            })
            .collect();
        format!(
            "{} {:>2} {}: {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            parts.join("; ")
        )
    }
}

/// Runs the scenario called `name`.
pub fn run_scenario(name: &str) -> Result<Check> {
    let (criterion, parts) = match name {
        "linear_convergence" => (1, linear_convergence()),
        "linear_huygens" => (2, linear_huygens()),
        "generic_tail" => (3, generic_tail()),
        "coefficient_identity" => (4, coefficient_identity()),
        "p2_faster_decay" => (5, p2_faster_decay()),
        "semilinear_decay" => (6, semilinear_decay()),
        "energy_decay" => (7, energy_decay()),
        "sensitivity" => (8, sensitivity_check()),
        "null_algebra" => (9, null_algebra()),
        "kirchhoff" => (10, kirchhoff()),
        other => {
            return Err(Error::Parameter(format!(
                "unknown scenario `{other}` (known: {})",
                SCENARIOS.join(", ")
            )))
        }
    };
    Ok(Check {
        criterion,
        name: name.to_string(),
        parts,
    })
}

fn bump(amplitude: f64, velocity: Velocity) -> InitialDataSpec {
    InitialDataSpec::CompactBump {
        amplitude,
        center: 2.0,
        width: 1.5,
        velocity,
    }
}

fn preset(name: &str) -> NullFormSpec {
    NullFormSpec::Preset(name.into())
}

fn tail_config(form: &str, data: InitialDataSpec, n: usize) -> RunConfig {
    let mut cfg = RunConfig::new(preset(form), data);
    cfg.n = n;
    cfg.tau_final = 300.0;
    cfg.cadence = 1.0;
    cfg
}

fn probe_fit(report: &TailReport, rho: f64) -> Option<f64> {
    report.probes.iter().find(|p| p.rho == rho).and_then(|p| p.fit.map(|f| f.slope))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("none".into(), |x| format!("{x:.3}"))
}

const BOUNDARY_LIMITED: &str = "pre-asymptotic: the bump's steep edges need N ~ 1e4 for 1e-7 (orders still rising towards 4)";

fn linear_convergence() -> Vec<Part> {
    let profile = ProfileFunction::new(1.0, 2.0, 1.5);
    let errors: Result<Vec<f64>> = [256, 512, 1024]
        .iter()
        .map(|&n| {
            let mut cfg = RunConfig::new(preset("linear"), bump(1.0, Velocity::Ingoing));
            cfg.n = n;
            cfg.tau_final = 6.0;
            cfg.cadence = 0.25;
            cfg.dissipation = 0.0;
            let mut err: f64 = 0.0;
            let run = evolve_with(&cfg, |ev, st| {
                let h = &ev.grid.height;
                for (j, &rho) in ev.grid.rho.iter().enumerate() {
                    let exact = if j == ev.n() {
                        exact_radiation_field(&profile, st.tau - h.scri_offset(), f64::INFINITY).0
                    } else {
                        let u = h.retarded_time(st.tau, rho);
                        exact_radiation_field(&profile, u, u + 2.0 * rho).0
                    };
                    err = err.max((st.psi[j] - exact).abs());
                }
            })?;
            match run.abort {
                Some(e) => Err(e),
                None => Ok(err),
            }
        })
        .collect();
    let e = match errors {
        Ok(e) => e,
        Err(e) => return vec![Part::failed("convergence", &e)],
    };
    let order = (e[1] / e[2]).log2();
    let orders = format!("errors {:.2e}/{:.2e}/{:.2e}", e[0], e[1], e[2]);
    vec![
        Part::new(
            "order",
            (order - 4.0).abs() <= 0.3,
            format!("{orders}, order {order:.2} (target 4.0 +- 0.3)"),
        )
        .limited(BOUNDARY_LIMITED),
        Part::new("max error", e[2] < 1e-7, format!("{:.2e} at N=1024 (target < 1e-7)", e[2]))
            .limited(BOUNDARY_LIMITED),
    ]
}

fn linear_huygens() -> Vec<Part> {
    let mut cfg = RunConfig::new(preset("linear"), bump(1.0, Velocity::TimeSymmetric));
    cfg.n = 512;
    cfg.tau_final = 40.0;
    cfg.cadence = 0.25;
    cfg.probes = vec![0.0];
    let run = match evolve(&cfg) {
        Ok(r) => r,
        Err(e) => return vec![Part::failed("huygens", &e)],
    };
    // the ingoing half has crossed the origin by t = center + width
    let crossing = 3.5;
    let series = run.probe_series(0);
    let peak = series.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let late = series
        .iter()
        .filter(|s| s.0 > crossing + 5.0)
        .map(|s| s.1.abs())
        .fold(0.0, f64::max);
    vec![Part::new(
        "origin residue",
        run.completed() && late < 1e-9 * peak,
        format!("max |psi(tau,0)| after tau = {} is {:.2e} of peak {peak:.3}", crossing + 5.0, late / peak),
    )]
}

fn generic_config() -> RunConfig {
    let mut cfg = tail_config("p3_radial", bump(0.05, Velocity::TimeSymmetric), 2048);
    cfg.energies = [0.1, 1.0, 1.9, 2.5].iter().map(|&p| EnergyRequest { k: 0, p }).collect();
    cfg
}

/// The long generic run, shared by the tail and energy scenarios.
fn generic_run() -> Result<&'static RunArtifact> {
    static RUN: OnceLock<Result<RunArtifact>> = OnceLock::new();
    RUN.get_or_init(|| evolve(&generic_config())).as_ref().map_err(Clone::clone)
}

fn generic_tail() -> Vec<Part> {
    let report = match generic_run().and_then(verify_prediction) {
        Ok(r) => r,
        Err(e) => return vec![Part::failed("generic tail", &e)],
    };
    let lpi = probe_fit(&report, 5.0);
    let drift = report.scri_fit.as_ref().map(|f| f.drift);
    vec![
        Part::new(
            "LPI(rho=5)",
            report.complete && lpi.is_some_and(|s| (s + 2.0).abs() <= 0.1),
            format!("{} over {:?} (target -2 +- 0.1)", fmt_opt(lpi), report.window),
        ),
        Part::new(
            "scri drift",
            drift.is_some_and(|d| d < 0.02),
            format!(
                "{} with c_total {:.5} (target < 0.02)",
                fmt_opt(drift),
                report.c_total_measured
            ),
        ),
    ]
}

fn identity_config() -> RunConfig {
    let data = InitialDataSpec::NoncompactTail {
        c_init: 0.3,
        delta_id: 0.5,
        amplitude: 0.05,
        center: 2.0,
        width: 1.5,
        velocity: Velocity::TimeSymmetric,
    };
    tail_config("p3_radial", data, 512)
}

fn coefficient_identity() -> Vec<Part> {
    let report = match evolve(&identity_config()).and_then(|r| verify_prediction(&r)) {
        Ok(r) => r,
        Err(e) => return vec![Part::failed("identity", &e)],
    };
    vec![Part::new(
        "c_total",
        report.complete && report.mismatch < 0.05,
        format!(
            "measured {:.5} vs c_init {:.5} + c_scri {:.5}: mismatch {:.2}% (target < 5%)",
            report.c_total_measured,
            report.c_init,
            report.c_scri.value,
            100.0 * report.mismatch
        ),
    )]
}

const P2_LIMITED: &str =
    "the P2 tail here is cubic in eps and decays like tau^-4.2 at fixed r, one power faster than the -3 target";

fn p2_faster_decay() -> Vec<Part> {
    // ε = 0.05 loses hyperbolicity at the origin for this form
    let eps = 0.03;
    let reports: Result<Vec<TailReport>> = ["p2_alpha0", "p3_radial"]
        .iter()
        .map(|form| {
            let mut cfg = tail_config(form, bump(eps, Velocity::TimeSymmetric), 512);
            cfg.probes = vec![5.0];
            verify_prediction(&evolve(&cfg)?)
        })
        .collect();
    let (p2, generic) = match reports {
        Ok(r) => (r[0].clone(), r[1].clone()),
        Err(e) => return vec![Part::failed("p2", &e)],
    };
    let lpi = probe_fit(&p2, 5.0);
    let ratio = p2.c_total_measured.abs() / generic.c_total_measured.abs();
    vec![
        Part::new(
            "LPI(rho=5)",
            p2.complete && lpi.is_some_and(|s| (s + 3.0).abs() <= 0.15),
            format!("{} over {:?} (target -3 +- 0.15)", fmt_opt(lpi), p2.window),
        )
        .limited(P2_LIMITED),
        Part::new(
            "scri amplitude",
            p2.complete && ratio < 1e-3,
            format!(
                "{:.2e} vs generic {:.2e}: ratio {ratio:.2e} (target < 1e-3)",
                p2.c_total_measured, generic.c_total_measured
            ),
        ),
    ]
}

const CHAIN_LIMITED: &str =
    "psi_(1) = psi - psi^2/2 agrees with psi to O(psi^2) once |psi| is small, so their power indices coincide";

fn semilinear_decay() -> Vec<Part> {
    let mut cfg = RunConfig::new(preset("semilinear_null"), bump(0.05, Velocity::TimeSymmetric));
    cfg.tau_final = 60.0;
    cfg.cadence = 0.25;
    cfg.probes = vec![5.0];
    let run = match evolve(&cfg) {
        Ok(r) => r,
        Err(e) => return vec![Part::failed("semilinear", &e)],
    };
    let floor = cfg.tolerances.noise_floor;
    let series = run.probe_series(0);
    let lpi = local_power_index(&series, floor);
    // the pulse has passed the probe once |ψ| peaked; look for the first
    // index below −3 after that while |ψ| is still above the floor
    let peak_tau = series.iter().fold((0.0, 0.0), |m, s| if s.1.abs() > m.1 { (s.0, s.1.abs()) } else { m }).0;
    let below = lpi
        .iter()
        .filter(|s| s.tau > peak_tau)
        .find(|s| s.lpi.is_some_and(|l| l < -3.0));
    let values: Vec<f64> = series.iter().map(|s| s.1).collect();
    let chain = match semilinear_transform(&values, 1) {
        Ok(c) => c,
        Err(e) => return vec![Part::failed("chain", &e)],
    };
    let chain_series: Vec<(f64, f64)> = series.iter().zip(&chain).map(|(s, c)| (s.0, *c)).collect();
    let chain_lpi = local_power_index(&chain_series, floor);
    let matched = lpi
        .iter()
        .zip(&chain_lpi)
        .filter_map(|(a, b)| Some((a.tau, a.lpi?, b.lpi?)))
        .rfind(|m| m.0 > peak_tau);
    vec![
        Part::new(
            "LPI(psi) < -3",
            run.completed() && below.is_some(),
            match below {
                Some(s) => format!("at tau = {} index {:.2} above floor {floor:e}", s.tau, s.lpi.unwrap_or(f64::NAN)),
                None => "never below -3 above the noise floor".into(),
            },
        ),
        Part::new(
            "LPI(psi_(1)) <= LPI(psi) - 0.8",
            matched.is_some_and(|m| m.2 <= m.1 - 0.8),
            match matched {
                Some((t, a, b)) => format!("at tau = {t}: {b:.2} vs {a:.2}"),
                None => "no matched late sample above the floor".into(),
            },
        )
        .limited(CHAIN_LIMITED),
    ]
}

const ENERGY_LIMITED: &str =
    "the target is a proved upper bound; the sharp rate is tau^(p-3) because rV(r psi) ~ c r/v^2";

fn energy_decay() -> Vec<Part> {
    let run = match generic_run() {
        Ok(r) => r,
        Err(e) => return vec![Part::failed("energies", &e)],
    };
    let delta = run.config.delta;
    let window = run.config.fit_window();
    run.config
        .energies
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (target, tol) = if e.p > 2.0 {
                (-(3.0 - delta) + e.p, 0.3)
            } else {
                (-(2.0 - delta) + e.p, 0.2)
            };
            let label = format!("E0_{}", e.p);
            let part = match fit_decay_rate(&run.energy_series(i), window) {
                Ok(f) => Part::new(
                    label,
                    (f.slope - target).abs() <= tol,
                    format!("slope {:.3} (target {target:.2} +- {tol})", f.slope),
                ),
                Err(err) => Part::failed(label, &err),
            };
            if e.p > 2.0 {
                part
            } else {
                part.limited(ENERGY_LIMITED)
            }
        })
        .collect()
}

fn sensitivity_check() -> Vec<Part> {
    let mut cfg = identity_config();
    cfg.tau_final = 200.0;
    match sensitivity(&cfg, &[-0.03, 0.03]) {
        Ok(r) => vec![Part::new(
            "dc_total/dc_init",
            r.slopes_within(0.9, 1.1),
            format!(
                "slopes {} (target in (0.9, 1.1))",
                r.slopes.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>().join(", ")
            ),
        )],
        Err(e) => vec![Part::failed("sensitivity", &e)],
    }
}

fn null_algebra() -> Vec<Part> {
    let gens = generators();
    let bad_null: Vec<&str> = gens.iter().filter(|g| !validate_null(&g.2)).map(|g| g.1.as_str()).collect();
    let mut misclassified = Vec::new();
    for (family, name, t) in &gens {
        match classify(t) {
            Ok(c) if c.in_span_p1p2 == (*family != Family::P3) => {}
            _ => misclassified.push(name.as_str()),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut accepted = Vec::new();
    for _ in 0..10 {
        // a random null combination plus one random surviving monomial
        let mut t = NullFormTensor::zero();
        for _ in 0..3 {
            let g = &gens[rng.gen_range(0..gens.len())].2;
            let w = BigRational::from_i64(rng.gen_range(-3..=3)).expect("integer");
            t = t.add(&g.scale(&w));
        }
        let (a, b, c) = (rng.gen_range(0..4), rng.gen_range(0..4), rng.gen_range(0..4));
        let k = [-2, -1, 1, 2][rng.gen_range(0..4)];
        if validate_null(&with_injected(&t, a, b, c, k)) {
            accepted.push(format!("({a},{b},{c})x{k}"));
        }
    }
    vec![
        Part::new(
            "generators null",
            bad_null.is_empty(),
            format!("{}/{} validate {bad_null:?}", gens.len() - bad_null.len(), gens.len()),
        ),
        Part::new(
            "injected rejected",
            accepted.is_empty(),
            format!("{}/10 rejected {accepted:?}", 10 - accepted.len()),
        ),
        Part::new(
            "span classification",
            misclassified.is_empty(),
            format!("{}/{} correct {misclassified:?}", gens.len() - misclassified.len(), gens.len()),
        ),
    ]
}

/// `ψ = t²[g(r − a) + g(r + a)]`, `g(x) = e^{−x²/w²}`, and its source `□ψ`.
struct GaussianShell {
    a: f64,
    w: f64,
}

impl GaussianShell {
    /// `(f, f′, f″)` of the even radial profile.
    fn profile(&self, r: f64) -> (f64, f64, f64) {
        let w2 = self.w * self.w;
        [r - self.a, r + self.a].iter().fold((0.0, 0.0, 0.0), |acc, &x| {
            let g = (-x * x / w2).exp();
            (acc.0 + g, acc.1 - 2.0 * x / w2 * g, acc.2 + (4.0 * x * x / (w2 * w2) - 2.0 / w2) * g)
        })
    }

    fn psi(&self, t: f64, r: f64) -> f64 {
        t * t * self.profile(r).0
    }
}

impl RadialSource for GaussianShell {
    fn value(&self, t: f64, r: f64) -> f64 {
        let (f, f1, f2) = self.profile(r);
        let laplacian = if r < 1e-8 { 3.0 * f2 } else { f2 + 2.0 * f1 / r };
        2.0 * f - t * t * laplacian
    }
}

fn kirchhoff() -> Vec<Part> {
    // the t⁻¹ correction to t⁻² is still 10% at t = 40
    let times = [80.0, 160.0, 320.0, 640.0, 1280.0];
    let slopes: Vec<Part> = [0.0, 2.0]
        .iter()
        .map(|&r| {
            let label = format!("model slope r={r}");
            let values: Result<Vec<(f64, f64)>> = times
                .iter()
                .map(|&t| kirchhoff_eval(&ModelSource, t, r, 0.0).map(|v| (t, v.value)))
                .collect();
            match values.and_then(|v| fit_power_index_all(&v)) {
                Ok(s) => Part::new(label, s <= -1.9, format!("{s:.3} over t in [80, 1280] (target <= -1.9)")),
                Err(e) => Part::failed(label, &e),
            }
        })
        .collect();
    let shell = GaussianShell { a: 3.0, w: 1.0 };
    let t = 2.0;
    let mut worst: f64 = 0.0;
    let mut shell_part = None;
    for r in [0.0, 1.5, 3.0, 4.5] {
        match kirchhoff_eval(&shell, t, r, 0.0) {
            Ok(v) => worst = worst.max((v.value - shell.psi(t, r)).abs()),
            Err(e) => shell_part = Some(Part::failed("closed form", &e)),
        }
    }
    let scale = shell.psi(t, 3.0).abs();
    let mut parts = slopes;
    parts.push(shell_part.unwrap_or_else(|| {
        Part::new(
            "closed form",
            worst < 1e-6 * scale,
            format!("max relative error {:.2e} (target < 1e-6)", worst / scale),
        )
    }));
    parts
}

/// Log–log slope through all samples (no window, no minimum count).
fn fit_power_index_all(series: &[(f64, f64)]) -> Result<f64> {
    let xy: Vec<(f64, f64)> = series
        .iter()
        .map(|&(t, v)| {
            if v > 0.0 {
                Ok((t.ln(), v.ln()))
            } else {
                Err(Error::Fit(format!("nonpositive value {v:e} at t = {t}")))
            }
        })
        .collect::<Result<_>>()?;
    Ok(crate::energies::linear_fit(&xy).0)
}
