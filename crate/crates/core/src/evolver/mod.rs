//! Method-of-lines evolution of the radiation field `Ψ = rψ` on compactified
//! hyperboloidal slices.
//!
//! In the frame `U = (1+h′)∂_τ − ∂_ρ`, `V = g∂_τ + ∂_ρ` the equation
//! `UVΨ = −rN` becomes, after division by `g = 1 − h′`,
//!
//! ```text
//! (1+h′ + rN₁/g) Ψ_ττ = (σ′²/g)Ψ_σσ + (σ″/g)Ψ_σ − (h″/g)Ψ_τ − 2h′(σ′/g)Ψ_τσ − rN₀/g
//! ```
//!
//! where `N = N₀ + N₁Ψ_ττ` is the null form (affine in `Ψ_ττ`). The nonlinear
//! terms are assembled from `φ = Ψ/ρ` and `π = Ψ_τ/ρ`, which are even in σ and
//! smooth through the origin; the last node uses the exact limits at scri.

mod grid;
mod initial;
mod run;
mod stencil;

pub use grid::Grid;
pub use initial::{make_initial_data, InitialDataSpec, TailProfile, Velocity};
pub use run::{build_evolver, evolve, evolve_with, DiagnosticRow, RunArtifact};
pub use stencil::{fornberg, Parity, Stencils};

use crate::error::{Error, Result};
use crate::nullform::{RadialNullForm, U, UU, UV, V, VV};
use serde::{Deserialize, Serialize};

/// One slice: `Ψ` and `Π = ∂_τΨ` at the nodes `σ_j = j/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridState {
    pub tau: f64,
    pub psi: Vec<f64>,
    pub pi: Vec<f64>,
}

impl GridState {
    pub fn zeros(n: usize) -> Self {
        Self {
            tau: 0.0,
            psi: vec![0.0; n + 1],
            pi: vec![0.0; n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.psi.len() - 1
    }

    pub fn sigma_grid(&self) -> Vec<f64> {
        let n = self.n();
        (0..=n).map(|j| j as f64 / n as f64).collect()
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.psi
            .iter()
            .zip(&self.pi)
            .position(|(a, b)| !a.is_finite() || !b.is_finite())
    }
}

/// Scratch arrays for one right-hand-side evaluation.
#[derive(Debug, Clone)]
pub struct Scratch {
    pub psi_s: Vec<f64>,
    pub psi_ss: Vec<f64>,
    pub pi_s: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_s: Vec<f64>,
    pub phi_ss: Vec<f64>,
    pub pv: Vec<f64>,
    pub pv_s: Vec<f64>,
    /// `rN₀/g` per node
    pub src: Vec<f64>,
    /// principal coefficient `A/g` per node
    pub a: Vec<f64>,
    /// `Ψ_ττ` per node
    pub x: Vec<f64>,
    ko: Vec<f64>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        let z = vec![0.0; n + 1];
        Self {
            psi_s: z.clone(),
            psi_ss: z.clone(),
            pi_s: z.clone(),
            phi: z.clone(),
            phi_s: z.clone(),
            phi_ss: z.clone(),
            pv: z.clone(),
            pv_s: z.clone(),
            src: z.clone(),
            a: z.clone(),
            x: z.clone(),
            ko: z,
        }
    }
}

#[derive(Debug, Clone)]
struct RkBuffers {
    kp: [Vec<f64>; 4],
    kq: [Vec<f64>; 4],
    tp: Vec<f64>,
    tq: Vec<f64>,
}

impl RkBuffers {
    fn new(n: usize) -> Self {
        let z = vec![0.0; n + 1];
        Self {
            kp: [z.clone(), z.clone(), z.clone(), z.clone()],
            kq: [z.clone(), z.clone(), z.clone(), z.clone()],
            tp: z.clone(),
            tq: z,
        }
    }
}

/// Per-run mutable buffers; one per thread.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub scratch: Scratch,
    rk: RkBuffers,
}

impl Workspace {
    pub fn new(n: usize) -> Self {
        Self {
            scratch: Scratch::new(n),
            rk: RkBuffers::new(n),
        }
    }
}

/// Default Kreiss–Oliger strength.
pub const DEFAULT_DISSIPATION: f64 = 0.02;
/// Abort when `|A| < factor·(1 − h′²)`.
pub const DEFAULT_HYPERBOLICITY_FACTOR: f64 = 0.1;

/// Immutable discretization of one equation on one grid.
#[derive(Debug, Clone)]
pub struct Evolver {
    pub grid: Grid,
    form: RadialNullForm,
    nonlinear: bool,
    dissipation: f64,
    hyperbolicity_factor: f64,
    stencils: Stencils,
    /// 1 when the slices satisfy `ρ²g → 1` at scri (η = 1), else 0
    kappa: f64,
}

impl Evolver {
    pub fn new(grid: Grid, form: RadialNullForm, dissipation: f64) -> Self {
        let kappa = if grid.height.eta() == 1.0 { 1.0 } else { 0.0 };
        Self {
            nonlinear: !form.is_zero(),
            grid,
            form,
            dissipation,
            hyperbolicity_factor: DEFAULT_HYPERBOLICITY_FACTOR,
            stencils: Stencils::new(),
            kappa,
        }
    }

    pub fn with_hyperbolicity_factor(mut self, factor: f64) -> Self {
        self.hyperbolicity_factor = factor;
        self
    }

    pub fn form(&self) -> &RadialNullForm {
        &self.form
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn workspace(&self) -> Workspace {
        Workspace::new(self.grid.n)
    }

    /// Largest stable step for the given CFL factor.
    pub fn max_dtau(&self, cfl: f64) -> f64 {
        cfl * self.grid.h / self.grid.max_speed
    }

    /// Fills `scratch.x` with `Ψ_ττ` (no dissipation) and the per-node
    /// principal coefficient and source.
    pub fn accel(&self, tau: f64, psi: &[f64], pi: &[f64], s: &mut Scratch) -> Result<()> {
        let g = &self.grid;
        let n = g.n;
        let h = g.h;
        self.stencils
            .derivatives(psi, h, Parity::Odd, &mut s.psi_s, &mut s.psi_ss);
        self.stencils.first(pi, h, Parity::Odd, &mut s.pi_s);
        if self.nonlinear {
            let sc = g.scale();
            s.phi[0] = s.psi_s[0] / sc;
            s.pv[0] = s.pi_s[0] / sc;
            for j in 1..=n {
                s.phi[j] = psi[j] * g.inv_rho[j];
                s.pv[j] = pi[j] * g.inv_rho[j];
            }
            self.stencils
                .derivatives(&s.phi, h, Parity::Even, &mut s.phi_s, &mut s.phi_ss);
            self.stencils.first(&s.pv, h, Parity::Even, &mut s.pv_s);
        }
        let f = &self.form;
        for j in 0..=n {
            let lin = g.sp2_over_g[j] * s.psi_ss[j] + g.spp_over_g[j] * s.psi_s[j]
                - g.hpp_over_g[j] * pi[j]
                - 2.0 * g.hp[j] * g.sp_over_g[j] * s.pi_s[j];
            let opg = g.opg[j];
            let (a, src) = if !self.nonlinear {
                (opg, 0.0)
            } else if j == n {
                let (p, q) = (psi[n], pi[n]);
                let k = self.kappa;
                (
                    2.0 - 4.0 * f.c(V, UU) * p * k,
                    k * (-4.0 * (f.c(U, UV) + 0.5 * f.tr(U)) * q * q - 2.0 * f.q() * p * q),
                )
            } else {
                let gg = g.g[j];
                let hp = g.hp[j];
                let hpp = g.hpp[j];
                let sp = g.sp[j];
                let phr = sp * s.phi_s[j];
                let phrr = g.sp2[j] * s.phi_ss[j] + g.spp[j] * s.phi_s[j];
                let pvr = sp * s.pv_s[j];
                let p = s.pv[j];
                let du = opg * p - phr;
                let dv = gg * p + phr;
                let psi_r_over_r = if j == 0 {
                    phrr
                } else {
                    (phr - hp * p) * g.inv_rho[j]
                };
                let uu0 = -2.0 * opg * pvr - hpp * p + phrr;
                let uv0 = 2.0 * hp * pvr + hpp * p - phrr;
                let vv0 = 2.0 * gg * pvr - hpp * p + phrr;
                let n0 = f.eval_psi([du, dv], [uu0, uv0, vv0], psi_r_over_r);
                // rN₁/g with Ψ_ττ entering UUψ, UVψ, VVψ through (1+h′)², g(1+h′), g²
                let rn1_over_g = du * (f.c(U, UV) * opg + f.c(U, VV) * gg)
                    + (dv / gg) * f.c(V, UU) * opg * opg
                    + dv * (f.c(V, UV) * opg + f.c(V, VV) * gg);
                (opg + rn1_over_g, n0 * g.r_over_g[j])
            };
            if !(a.abs() >= self.hyperbolicity_factor * opg) {
                return Err(Error::HyperbolicityLoss {
                    tau,
                    node: j,
                    sigma: g.sigma[j],
                    rho: g.rho[j],
                    coefficient: a * g.g[j],
                });
            }
            let x = (lin - src) / a;
            if !x.is_finite() {
                return Err(Error::NonFinite { tau, node: j });
            }
            s.a[j] = a;
            s.src[j] = src;
            s.x[j] = x;
        }
        Ok(())
    }

    /// `(dΨ/dτ, dΠ/dτ)` including dissipation, written into `dpsi`, `dpi`.
    fn rhs_into(
        &self,
        tau: f64,
        psi: &[f64],
        pi: &[f64],
        s: &mut Scratch,
        dpsi: &mut [f64],
        dpi: &mut [f64],
    ) -> Result<()> {
        self.accel(tau, psi, pi, s)?;
        dpsi.copy_from_slice(pi);
        dpi.copy_from_slice(&s.x);
        if self.dissipation != 0.0 {
            stencil::fourth_difference(pi, Parity::Odd, &mut s.ko);
            let k = self.dissipation / (16.0 * self.grid.h);
            for (d, ko) in dpi.iter_mut().zip(&s.ko) {
                *d -= k * ko;
            }
        }
        dpsi[0] = 0.0;
        dpi[0] = 0.0;
        Ok(())
    }

    /// Right-hand side of the first-order system.
    pub fn rhs(&self, state: &GridState) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.grid.n;
        let mut s = Scratch::new(n);
        let mut dpsi = vec![0.0; n + 1];
        let mut dpi = vec![0.0; n + 1];
        self.rhs_into(state.tau, &state.psi, &state.pi, &mut s, &mut dpsi, &mut dpi)?;
        Ok((dpsi, dpi))
    }

    /// One classical RK4 step, in place.
    /// Returns `(lim r³N, UΨ)` at scri on the slice the step started from.
    pub fn step_in_place(&self, st: &mut GridState, dtau: f64, ws: &mut Workspace) -> Result<(f64, f64)> {
        let Workspace { scratch, rk } = ws;
        let RkBuffers { kp, kq, tp, tq } = rk;
        let t0 = st.tau;
        let [k1p, k2p, k3p, k4p] = kp;
        let [k1q, k2q, k3q, k4q] = kq;
        self.rhs_into(t0, &st.psi, &st.pi, scratch, k1p, k1q)?;
        let start = (self.scri_source(scratch), 2.0 * st.pi[self.grid.n]);
        let stage = |tp: &mut Vec<f64>, tq: &mut Vec<f64>, kp: &[f64], kq: &[f64], c: f64| {
            for j in 0..tp.len() {
                tp[j] = st.psi[j] + c * kp[j];
                tq[j] = st.pi[j] + c * kq[j];
            }
        };
        stage(tp, tq, k1p, k1q, 0.5 * dtau);
        self.rhs_into(t0 + 0.5 * dtau, tp, tq, scratch, k2p, k2q)?;
        stage(tp, tq, k2p, k2q, 0.5 * dtau);
        self.rhs_into(t0 + 0.5 * dtau, tp, tq, scratch, k3p, k3q)?;
        stage(tp, tq, k3p, k3q, dtau);
        self.rhs_into(t0 + dtau, tp, tq, scratch, k4p, k4q)?;
        let c = dtau / 6.0;
        for j in 0..st.psi.len() {
            st.psi[j] += c * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j]);
            st.pi[j] += c * (k1q[j] + 2.0 * k2q[j] + 2.0 * k3q[j] + k4q[j]);
        }
        st.psi[0] = 0.0;
        st.pi[0] = 0.0;
        st.tau = t0 + dtau;
        if let Some(node) = st.first_non_finite() {
            return Err(Error::NonFinite { tau: st.tau, node });
        }
        Ok(start)
    }

    /// One RK4 step returning the new slice.
    pub fn step(&self, state: &GridState, dtau: f64) -> Result<GridState> {
        let mut ws = self.workspace();
        let mut out = state.clone();
        self.step_in_place(&mut out, dtau, &mut ws)?;
        Ok(out)
    }

    /// `r²VΨ` at every interior node, from the slice and `Ψ_σ`.
    fn r2_vpsi(&self, j: usize, pi: f64, psi_s: f64) -> f64 {
        let g = &self.grid;
        let rho = g.rho[j];
        rho * rho * (g.g[j] * pi + g.sp[j] * psi_s)
    }

    /// `lim r³N` at scri from the per-node fields left in `s` by [`Self::accel`].
    pub fn scri_source(&self, s: &Scratch) -> f64 {
        let g = &self.grid;
        let n = g.n;
        if !self.nonlinear {
            return 0.0;
        }
        if self.kappa == 1.0 {
            return s.src[n] + (s.a[n] - 2.0) * s.x[n];
        }
        let r: Vec<f64> = (n - 8..n)
            .map(|j| {
                let rho = g.rho[j];
                rho * rho * g.g[j] * (s.src[j] + (s.a[j] - g.opg[j]) * s.x[j])
            })
            .collect();
        extrapolate_quadratic(&g.omega[n - 8..n], &r)
    }

    /// Scri and probe quantities of a slice. `scratch` is left holding the
    /// fields of `state`.
    pub fn observe(&self, state: &GridState, probes: &[f64], s: &mut Scratch) -> Result<Observation> {
        self.accel(state.tau, &state.psi, &state.pi, s)?;
        let g = &self.grid;
        let n = g.n;
        let sc = g.scale();
        // φ = Ψ/ρ is needed for probes even in the linear case
        s.phi[0] = s.psi_s[0] / sc;
        for j in 1..=n {
            s.phi[j] = state.psi[j] * g.inv_rho[j];
        }
        let probe_psi = probes
            .iter()
            .map(|&rho| interpolate_even(&s.phi, g.map.sigma(rho)))
            .collect();
        let r3source_scri = self.scri_source(s);
        let vpsi_scri = if self.kappa == 1.0 {
            // ρ²g → 1 and ρ²σ′ → S/2 at scri
            state.pi[n] + 0.5 * sc * s.psi_s[n]
        } else {
            let v: Vec<f64> = (n - 8..n)
                .map(|j| self.r2_vpsi(j, state.pi[j], s.psi_s[j]))
                .collect();
            extrapolate_quadratic(&g.omega[n - 8..n], &v)
        };
        Ok(Observation {
            tau: state.tau,
            probe_psi,
            psi_scri: state.psi[n],
            u_psi_scri: 2.0 * state.pi[n],
            vpsi_scri,
            r3source_scri,
        })
    }

    /// `v²VΨ` on the slice at interior nodes, with `v = τ + ρ + h(ρ)`.
    pub fn v2_vpsi_profile(&self, state: &GridState) -> Vec<(f64, f64)> {
        let g = &self.grid;
        let mut psi_s = vec![0.0; g.n + 1];
        self.stencils.first(&state.psi, g.h, Parity::Odd, &mut psi_s);
        (1..g.n)
            .map(|j| {
                let rho = g.rho[j];
                let v = state.tau + 2.0 * rho - g.height.rho_minus_h(rho);
                let vpsi = g.g[j] * state.pi[j] + g.sp[j] * psi_s[j];
                (rho, v * v * vpsi)
            })
            .collect()
    }

    pub fn stencils(&self) -> &Stencils {
        &self.stencils
    }
}

/// Scri and probe values of one slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub tau: f64,
    /// `ψ = Ψ/ρ` at the configured probe radii
    pub probe_psi: Vec<f64>,
    pub psi_scri: f64,
    /// `UΨ` at scri
    pub u_psi_scri: f64,
    /// `lim r²VΨ` at scri
    pub vpsi_scri: f64,
    /// `lim r³N` at scri, where `□ψ = N`
    pub r3source_scri: f64,
}

/// Six-point Lagrange interpolation of an even field given at `σ_j = j/N`.
pub fn interpolate_even(f: &[f64], sigma: f64) -> f64 {
    let n = f.len() - 1;
    let x = sigma * n as f64;
    let base = x.floor() as isize;
    if (x - base as f64) == 0.0 && (base as usize) <= n {
        return f[base as usize];
    }
    let start = (base - 2).min(n as isize - 5);
    let at = |k: isize| f[k.unsigned_abs()];
    let nodes: Vec<isize> = (start..start + 6).collect();
    let mut acc = 0.0;
    for &k in &nodes {
        let mut w = 1.0;
        for &m in &nodes {
            if m != k {
                w *= (x - m as f64) / (k - m) as f64;
            }
        }
        acc += w * at(k);
    }
    acc
}

/// Least-squares quadratic in `x` evaluated at `x = 0`.
pub fn extrapolate_quadratic(x: &[f64], y: &[f64]) -> f64 {
    use nalgebra::{DMatrix, DVector};
    let a = DMatrix::from_fn(x.len(), 3, |i, k| x[i].powi(k as i32));
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    match svd.solve(&b, 1e-14) {
        Ok(c) => c[0],
        Err(_) => f64::NAN,
    }
}
