//! Retarded (Kirchhoff/Duhamel) solutions of the inhomogeneous wave equation
//! for radial sources, by nested Gauss–Legendre quadrature.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use std::sync::OnceLock;

/// A radial spacetime source `F(t, r)`.
pub trait RadialSource {
    fn value(&self, t: f64, r: f64) -> f64;

    /// Radius outside of which `F(t, ·)` vanishes; `+∞` when unbounded and
    /// negative when `F(t, ·) ≡ 0`.
    fn outer_radius(&self, _t: f64) -> f64 {
        f64::INFINITY
    }
}

impl<F: Fn(f64, f64) -> f64> RadialSource for F {
    fn value(&self, t: f64, r: f64) -> f64 {
        self(t, r)
    }
}

/// Value of the retarded solution and the relative change of the last
/// refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirchhoffValue {
    pub value: f64,
    pub estimate: f64,
    /// panels per integration interval at convergence
    pub panels: usize,
}

pub const KIRCHHOFF_NODES: usize = 64;
pub const KIRCHHOFF_RTOL: f64 = 1e-8;
const MAX_PANELS: usize = 64;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(KIRCHHOFF_NODES))
}

fn panels(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect()
}

/// Lower end of the `μ = cos θ` range on the backward cone sphere of radius
/// `s` about a point at radius `r` that lies inside the support ball `R`.
fn mu_low(r: f64, s: f64, big_r: f64) -> f64 {
    if !big_r.is_finite() {
        return -1.0;
    }
    if big_r < 0.0 {
        // no support at this retarded time
        return 1.0;
    }
    if r == 0.0 || s == 0.0 {
        return if s.max(r) <= big_r { -1.0 } else { 1.0 };
    }
    ((r * r + s * s - big_r * big_r) / (2.0 * r * s)).clamp(-1.0, 1.0)
}

/// Cone radii `s ∈ (0, s_max)` where the support boundary starts or stops
/// cutting the sphere, i.e. where the inner integrand has a kink.
fn kinks<S: RadialSource + ?Sized>(src: &S, t: f64, r: f64, s_max: f64) -> Vec<f64> {
    let big_r = |s: f64| src.outer_radius(t - s);
    if !big_r(0.0).is_finite() && !big_r(s_max).is_finite() {
        return Vec::new();
    }
    let crossings: [Box<dyn Fn(f64) -> f64>; 2] = [
        Box::new(move |s: f64| big_r(s) - (r + s)),
        Box::new(move |s: f64| big_r(s) - (r - s).abs()),
    ];
    let samples = 2048;
    let mut out = Vec::new();
    for g in &crossings {
        let mut prev = (0.0, g(0.0));
        for i in 1..=samples {
            let s = s_max * i as f64 / samples as f64;
            let cur = (s, g(s));
            if prev.1.is_finite() && cur.1.is_finite() && prev.1.signum() != cur.1.signum() {
                let (mut lo, mut hi) = (prev.0, cur.0);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid).signum() == g(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * s_max.max(1.0));
    out
}

fn evaluate<S: RadialSource + ?Sized>(src: &S, t: f64, r: f64, breaks: &[f64], k: usize) -> f64 {
    let gl = rule();
    let inner = |s: f64| -> f64 {
        let tr = t - s;
        if r == 0.0 {
            return if s <= src.outer_radius(tr) { s * src.value(tr, s) } else { 0.0 };
        }
        let lo = mu_low(r, s, src.outer_radius(tr));
        if lo >= 1.0 {
            return 0.0;
        }
        let val = gl.integrate_panels(&panels(lo, 1.0, k), |mu| {
            let rr = (r * r + s * s - 2.0 * r * s * mu).max(0.0).sqrt();
            src.value(tr, rr)
        });
        0.5 * s * val
    };
    breaks
        .windows(2)
        .map(|w| gl.integrate_panels(&panels(w[0], w[1], k), inner))
        .sum()
}

/// Retarded solution of `(∂_t² − Δ)ψ = F` with vanishing data at `t0`,
/// evaluated at time `t` and radius `r`:
/// `ψ = ∫₀^{t−t0} (s/2) ∫₋₁¹ F(t − s, |x − sω|) dμ ds`.
///
/// The cone integral is split where the source support boundary meets the
/// sphere, and panels are doubled until the relative change drops below
/// [`KIRCHHOFF_RTOL`].
pub fn kirchhoff_eval<S: RadialSource + ?Sized>(src: &S, t: f64, r: f64, t0: f64) -> Result<KirchhoffValue> {
    if !(r >= 0.0) || !(t >= t0) {
        return Err(Error::Parameter(format!("need r >= 0 and t >= t0, got t = {t}, r = {r}, t0 = {t0}")));
    }
    let s_max = t - t0;
    let mut breaks = vec![0.0];
    breaks.extend(kinks(src, t, r, s_max));
    breaks.push(s_max);
    let mut k = 1;
    let mut prev = evaluate(src, t, r, &breaks, k);
    let mut change = f64::INFINITY;
    while k < MAX_PANELS {
        k *= 2;
        let cur = evaluate(src, t, r, &breaks, k);
        change = if cur == prev {
            0.0
        } else {
            (cur - prev).abs() / cur.abs().max(prev.abs())
        };
        prev = cur;
        if change < KIRCHHOFF_RTOL {
            return Ok(KirchhoffValue {
                value: cur,
                estimate: change,
                panels: k,
            });
        }
    }
    Err(Error::Quadrature {
        estimate: prev,
        achieved: change,
    })
}

/// `t⁻³(t − r)⁻³` inside `r ≤ t − 1`: the decay class of the quadratic
/// null-form source of a compactly supported solution.
#[derive(Debug, Clone, Copy)]
pub struct ModelSource;

impl RadialSource for ModelSource {
    fn value(&self, t: f64, r: f64) -> f64 {
        if t < 1.0 || r > t - 1.0 {
            0.0
        } else {
            (t * (t - r)).powi(-3)
        }
    }

    fn outer_radius(&self, t: f64) -> f64 {
        (t - 1.0).max(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_source() {
        let v = kirchhoff_eval(&|_: f64, _: f64| 0.0, 7.0, 1.5, 0.0).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn constant_source_gives_half_t_squared() {
        // (∂_t² − Δ)ψ = 1 with zero data: ψ = t²/2
        for &r in &[0.0, 0.7, 3.0] {
            let v = kirchhoff_eval(&|_: f64, _: f64| 1.0, 2.5, r, 0.0).unwrap();
            assert_relative_eq!(v.value, 3.125, max_relative = 1e-13);
        }
    }

    #[test]
    fn model_source_at_origin_matches_one_dimensional_integral() {
        // ψ(t, 0) = ∫₀^{(t−1)/2} s (t−s)⁻³ (t−2s)⁻³ ds
        let t = 12.0;
        let direct = crate::quadrature::adaptive(
            |s| s * ((t - s) * (t - 2.0 * s)).powi(-3),
            0.0,
            0.5 * (t - 1.0),
            1e-15,
        );
        let v = kirchhoff_eval(&ModelSource, t, 0.0, 0.0).unwrap();
        assert_relative_eq!(v.value, direct, max_relative = 1e-9);
    }
}
