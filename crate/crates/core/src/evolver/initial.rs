//! Initial data on the slice `τ = 0`.

use super::grid::Grid;
use super::GridState;
use crate::error::{Error, Result};
use crate::oracle::ProfileFunction;
use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta, beta_reg};

/// Initial velocity of a compact pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Velocity {
    /// `Π = 0`; half the pulse falls in, half leaves.
    #[default]
    TimeSymmetric,
    /// `VΨ = 0`.
    Outgoing,
    /// Exact free ingoing wave `Ψ = −f(v)` with the profile centred in `v`.
    Ingoing,
}

fn default_center() -> f64 {
    2.0
}
fn default_width() -> f64 {
    1.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDataSpec {
    /// `Ψ = ε·B((ρ − c)/w)` (or in `v` for the ingoing pulse).
    CompactBump {
        amplitude: f64,
        #[serde(default = "default_center")]
        center: f64,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default)]
        velocity: Velocity,
    },
    /// Free-wave data `Ψ = F(u) − F(v)` with `v²VΨ → c_init` at rate
    /// `v^{−δ_id}`, plus an optional compact pulse on top.
    NoncompactTail {
        c_init: f64,
        delta_id: f64,
        #[serde(default)]
        amplitude: f64,
        #[serde(default = "default_center")]
        center: f64,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default)]
        velocity: Velocity,
    },
}

impl InitialDataSpec {
    pub fn validate(&self) -> Result<()> {
        let (amplitude, center, width) = match *self {
            InitialDataSpec::CompactBump {
                amplitude,
                center,
                width,
                ..
            } => (amplitude, center, width),
            InitialDataSpec::NoncompactTail {
                c_init,
                delta_id,
                amplitude,
                center,
                width,
                ..
            } => {
                if !c_init.is_finite() {
                    return Err(Error::config("data.c_init", "must be finite"));
                }
                if !(delta_id > 0.0 && delta_id.is_finite()) {
                    return Err(Error::config(
                        "data.delta_id",
                        "remainder exponent must be positive (|v^2 V Psi - c_init| <= D v^-delta)",
                    ));
                }
                (amplitude, center, width)
            }
        };
        if !amplitude.is_finite() {
            return Err(Error::config("data.amplitude", "must be finite"));
        }
        if !(width > 0.0) {
            return Err(Error::config("data.width", "must be positive"));
        }
        if !(center - width > 0.0) || !center.is_finite() {
            return Err(Error::config(
                "data.center",
                "pulse support [center - width, center + width] must stay away from the origin",
            ));
        }
        Ok(())
    }

    pub fn c_init(&self) -> f64 {
        match *self {
            InitialDataSpec::CompactBump { .. } => 0.0,
            InitialDataSpec::NoncompactTail { c_init, .. } => c_init,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, InitialDataSpec::CompactBump { .. })
    }

    /// `δ_id` of the noncompact family.
    pub fn remainder_exponent(&self) -> Option<f64> {
        match *self {
            InitialDataSpec::CompactBump { .. } => None,
            InitialDataSpec::NoncompactTail { delta_id, .. } => Some(delta_id),
        }
    }

    /// Copy with the pulse amplitude and `c_init` multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut out = *self;
        match &mut out {
            InitialDataSpec::CompactBump { amplitude, .. } => *amplitude *= k,
            InitialDataSpec::NoncompactTail {
                c_init, amplitude, ..
            } => {
                *c_init *= k;
                *amplitude *= k;
            }
        }
        out
    }
}

/// Profile `F` of the noncompact family, with
/// `F′(x) = −(c/2)(1+x²)^{−1}(1 − (1+x²)^{−δ/2})` and `F(0) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct TailProfile {
    c: f64,
    a: f64,
    half_beta: f64,
}

impl TailProfile {
    pub fn new(c_init: f64, delta: f64) -> Self {
        let b = 0.5 * (1.0 + delta);
        Self {
            c: c_init,
            a: 1.0 + 0.5 * delta,
            half_beta: 0.5 * beta(0.5, b),
        }
    }

    pub fn df(&self, x: f64) -> f64 {
        let q = 1.0 + x * x;
        -0.5 * self.c / q * (1.0 - q.powf(1.0 - self.a))
    }

    /// `F(x) = −(c/2)[arctan x − ∫₀^x (1+s²)^{−a} ds]`.
    pub fn f(&self, x: f64) -> f64 {
        let b = self.a - 0.5;
        let inner = if x >= 0.0 { 1.0 } else { -1.0 }
            * self.half_beta
            * beta_reg(0.5, b, x * x / (1.0 + x * x));
        -0.5 * self.c * (x.atan() - inner)
    }

    /// `F(∞)`.
    pub fn f_inf(&self) -> f64 {
        -0.5 * self.c * (std::f64::consts::FRAC_PI_2 - self.half_beta)
    }
}

fn add_pulse(grid: &Grid, prof: &ProfileFunction, velocity: Velocity, psi: &mut [f64], pi: &mut [f64]) {
    let h = grid.height;
    for j in 1..grid.n {
        let rho = grid.rho[j];
        match velocity {
            Velocity::Ingoing => {
                let v = 2.0 * rho - h.rho_minus_h(rho);
                let (f, df, _) = prof.eval(v);
                psi[j] -= f;
                pi[j] -= df;
            }
            Velocity::TimeSymmetric | Velocity::Outgoing => {
                let (f, df, _) = prof.eval(rho);
                psi[j] += f;
                if velocity == Velocity::Outgoing {
                    // VΨ = gΠ + ∂_ρΨ = 0
                    pi[j] -= df / grid.g[j];
                }
            }
        }
    }
}

/// Builds the initial slice for `spec` on `grid`.
pub fn make_initial_data(spec: &InitialDataSpec, grid: &Grid) -> Result<GridState> {
    spec.validate()?;
    let n = grid.n;
    let mut psi = vec![0.0; n + 1];
    let mut pi = vec![0.0; n + 1];
    match *spec {
        InitialDataSpec::CompactBump {
            amplitude,
            center,
            width,
            velocity,
        } => {
            let prof = ProfileFunction::new(amplitude, center, width);
            add_pulse(grid, &prof, velocity, &mut psi, &mut pi);
        }
        InitialDataSpec::NoncompactTail {
            c_init,
            delta_id,
            amplitude,
            center,
            width,
            velocity,
        } => {
            let tail = TailProfile::new(c_init, delta_id);
            let h = grid.height;
            for j in 1..=n {
                let (fu, dfu, fv, dfv) = if j == n {
                    let u = -h.scri_offset();
                    (tail.f(u), tail.df(u), tail.f_inf(), 0.0)
                } else {
                    let rho = grid.rho[j];
                    let rmh = h.rho_minus_h(rho);
                    let u = -rmh;
                    let v = 2.0 * rho - rmh;
                    (tail.f(u), tail.df(u), tail.f(v), tail.df(v))
                };
                psi[j] = fu - fv;
                pi[j] = dfu - dfv;
            }
            if amplitude != 0.0 {
                let prof = ProfileFunction::new(amplitude, center, width);
                add_pulse(grid, &prof, velocity, &mut psi, &mut pi);
            }
        }
    }
    Ok(GridState { tau: 0.0, psi, pi })
}
