//! Hyperboloidal slicing `τ = t − h(r)` and the compactified radial coordinate.
//!
//! The default profile has `h′(r) = 1 − ⟨r⟩^{−1−η}`, so `1 − h′` decays like
//! `r^{−1−η}` and the slices become asymptotically null. Throughout we write
//! `g := 1 − h′`; most evolution coefficients are expressed through `g` to avoid
//! cancellation far out.

use crate::error::{Error, Result};
use crate::quadrature;
use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta, beta_reg};

/// Hyperboloidal height profile `h(r)` with `h′ = 1 − (1 + r²)^{−(1+η)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightFunction {
    eta: f64,
    /// `∫₀^∞ (1 − h′) dr`, the limit of `ρ − h(ρ)`.
    scri_offset: f64,
}

/// Construct the default profile for `η ∈ (0, 1]`.
pub fn default_height(eta: f64) -> Result<HeightFunction> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Parameter(format!(
            "eta = {eta} outside (0, 1]: slices must be spacelike and approach null infinity \
             with 1 - h'(r) comparable to r^(-1-eta)"
        )));
    }
    Ok(HeightFunction {
        eta,
        scri_offset: 0.5 * beta(0.5, 0.5 * eta),
    })
}

impl HeightFunction {
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `g(r) = 1 − h′(r) = ⟨r⟩^{−1−η}`.
    #[inline]
    pub fn g(&self, r: f64) -> f64 {
        (1.0 + r * r).powf(-0.5 * (1.0 + self.eta))
    }

    /// `h′(r)`.
    #[inline]
    pub fn hp(&self, r: f64) -> f64 {
        // 1 − ⟨r⟩^{−1−η} without cancellation near the origin
        -(-0.5 * (1.0 + self.eta) * (r * r).ln_1p()).exp_m1()
    }

    /// `h″(r) = (1+η) r ⟨r⟩^{−3−η}`.
    #[inline]
    pub fn hpp(&self, r: f64) -> f64 {
        (1.0 + self.eta) * r * (1.0 + r * r).powf(-0.5 * (3.0 + self.eta))
    }

    /// `ρ − h(ρ) = ∫₀^ρ g`, increasing to [`Self::scri_offset`].
    pub fn rho_minus_h(&self, rho: f64) -> f64 {
        if rho == f64::INFINITY {
            return self.scri_offset;
        }
        if self.eta == 1.0 {
            return rho.atan();
        }
        if rho <= 1.0 {
            return quadrature::adaptive(|s| self.g(s), 0.0, rho, 1e-15);
        }
        // Complement via the regularised incomplete beta function; this keeps
        // full relative accuracy of the (small) tail for large ρ.
        let x = 1.0 / (1.0 + rho * rho);
        self.scri_offset - self.scri_offset * beta_reg(0.5 * self.eta, 0.5, x)
    }

    /// `L − (ρ − h(ρ)) = ∫_ρ^∞ g`; behaves like `ρ^{−η}/η`.
    pub fn scri_distance(&self, rho: f64) -> f64 {
        if rho == f64::INFINITY {
            return 0.0;
        }
        if self.eta == 1.0 {
            // π/2 − arctan ρ = arctan(1/ρ) for ρ > 0.
            return if rho > 0.0 {
                (1.0 / rho).atan()
            } else {
                self.scri_offset
            };
        }
        let x = 1.0 / (1.0 + rho * rho);
        self.scri_offset * beta_reg(0.5 * self.eta, 0.5, x)
    }

    /// `h(r)`, with `h(0) = 0`.
    pub fn h(&self, r: f64) -> f64 {
        if r <= 1.0 {
            quadrature::adaptive(|s| self.hp(s), 0.0, r, 1e-16)
        } else {
            r - self.rho_minus_h(r)
        }
    }

    /// `L = lim (ρ − h(ρ))`, the offset between `τ` and retarded time `u` at scri.
    pub fn scri_offset(&self) -> f64 {
        self.scri_offset
    }

    /// Retarded time `u = t − r` of the point `(τ, ρ)`.
    pub fn retarded_time(&self, tau: f64, rho: f64) -> f64 {
        tau - self.rho_minus_h(rho)
    }
}

/// `(t, r) → (τ, ρ)`.
pub fn to_hyperboloidal(t: f64, r: f64, h: &HeightFunction) -> (f64, f64) {
    (t - h.h(r), r)
}

/// `(τ, ρ) → (t, r)`.
pub fn from_hyperboloidal(tau: f64, rho: f64, h: &HeightFunction) -> (f64, f64) {
    (tau + h.h(rho), rho)
}

/// Coefficients with `V = aV ∂_τ + bV ∂_ρ` and `U = aU ∂_τ + bU ∂_ρ`.
pub fn null_frame_coeffs(rho: f64, h: &HeightFunction) -> (f64, f64, f64, f64) {
    let g = h.g(rho);
    (g, 1.0, 2.0 - g, -1.0)
}

/// Odd compactification `ρ = Sσ/(1 − σ²)` of `[0, ∞)` onto `[0, 1)`.
///
/// Being odd in σ, the map carries the odd/even parity of the radiation field
/// and of `ψ` across `σ = 0`, so reflection ghosts are exact. The complement
/// `Ω = 1 − σ` is tracked separately to keep the inverse accurate near scri.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactMap {
    pub scale: f64,
}

impl CompactMap {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Parameter(format!(
                "compactification scale S = {scale} must be positive"
            )));
        }
        Ok(Self { scale })
    }

    pub fn sigma(&self, rho: f64) -> f64 {
        let s = self.scale;
        if rho == f64::INFINITY {
            return 1.0;
        }
        2.0 * rho / (s + (s * s + 4.0 * rho * rho).sqrt())
    }

    /// `Ω = 1 − σ(ρ)` without cancellation.
    pub fn omega(&self, rho: f64) -> f64 {
        let s = self.scale;
        if rho == f64::INFINITY {
            return 0.0;
        }
        let root = (s * s + 4.0 * rho * rho).sqrt();
        (s + s * s / (root + 2.0 * rho)) / (s + root)
    }

    /// Inverse map from the pair `(σ, Ω = 1 − σ)`.
    pub fn rho_from(&self, sigma: f64, omega: f64) -> f64 {
        if omega <= 0.0 {
            return f64::INFINITY;
        }
        self.scale * sigma / (omega * (1.0 + sigma))
    }

    pub fn rho(&self, sigma: f64) -> f64 {
        self.rho_from(sigma, 1.0 - sigma)
    }

    /// `dσ/dρ` at `σ`.
    pub fn jacobian(&self, sigma: f64) -> f64 {
        let w = 1.0 - sigma * sigma;
        w * w / (self.scale * (1.0 + sigma * sigma))
    }
}
