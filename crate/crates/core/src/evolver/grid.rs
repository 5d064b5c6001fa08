//! Compactified radial grid and the slice-geometry coefficients at its nodes.

use crate::error::Result;
use crate::foliation::{CompactMap, HeightFunction};

/// Uniform grid `σ_j = j/N` on `[0, 1]` with every coefficient of the
/// radiation-field equation evaluated in a form that stays regular at `σ = 1`.
///
/// With `w = 1 − σ²` and `Q = w² + S²σ²` the node values are
/// `ρ = Sσ/w`, `g = 1 − h′ = (w²/Q)^{(1+η)/2}`, `σ′ = w²/(S(1+σ²))`, and the
/// quotients by `g` below, all finite at scri for `η ≤ 1`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub map: CompactMap,
    pub height: HeightFunction,
    pub sigma: Vec<f64>,
    /// `1 − σ`, exact at the nodes
    pub omega: Vec<f64>,
    /// `ρ`, `+∞` at the last node
    pub rho: Vec<f64>,
    /// `1/ρ`, zero at scri and unused at the origin
    pub inv_rho: Vec<f64>,
    pub g: Vec<f64>,
    pub hp: Vec<f64>,
    /// `1 + h′ = 2 − g`
    pub opg: Vec<f64>,
    pub hpp: Vec<f64>,
    /// `σ′ = dσ/dρ`
    pub sp: Vec<f64>,
    pub sp2: Vec<f64>,
    /// `σ″ = d²σ/dρ²`
    pub spp: Vec<f64>,
    pub sp_over_g: Vec<f64>,
    pub sp2_over_g: Vec<f64>,
    pub spp_over_g: Vec<f64>,
    pub hpp_over_g: Vec<f64>,
    /// `ρ/g`, zero at the origin, unused at scri
    pub r_over_g: Vec<f64>,
    /// `dρ/dσ` at interior nodes (infinite at scri)
    pub drho_dsigma: Vec<f64>,
    /// Largest characteristic speed in σ per unit τ.
    pub max_speed: f64,
}

impl Grid {
    pub fn new(n: usize, map: CompactMap, height: HeightFunction) -> Result<Self> {
        if n < 16 {
            return Err(crate::Error::Parameter(format!("grid needs N >= 16, got {n}")));
        }
        let s = map.scale;
        let eta = height.eta();
        let nf = n as f64;
        let mut grid = Grid {
            n,
            h: 1.0 / nf,
            map,
            height,
            sigma: vec![0.0; n + 1],
            omega: vec![0.0; n + 1],
            rho: vec![0.0; n + 1],
            inv_rho: vec![0.0; n + 1],
            g: vec![0.0; n + 1],
            hp: vec![0.0; n + 1],
            opg: vec![0.0; n + 1],
            hpp: vec![0.0; n + 1],
            sp: vec![0.0; n + 1],
            sp2: vec![0.0; n + 1],
            spp: vec![0.0; n + 1],
            sp_over_g: vec![0.0; n + 1],
            sp2_over_g: vec![0.0; n + 1],
            spp_over_g: vec![0.0; n + 1],
            hpp_over_g: vec![0.0; n + 1],
            r_over_g: vec![0.0; n + 1],
            drho_dsigma: vec![0.0; n + 1],
            max_speed: 0.0,
        };
        for j in 0..=n {
            let sg = j as f64 / nf;
            let om = (n - j) as f64 / nf;
            let w = om * (1.0 + sg);
            let q = w * w + s * s * sg * sg;
            let one_s2 = 1.0 + sg * sg;
            let qa = q.powf(0.5 * (1.0 + eta));
            let rho = map.rho_from(sg, om);
            let g = (w * w / q).powf(0.5 * (1.0 + eta));
            grid.sigma[j] = sg;
            grid.omega[j] = om;
            grid.rho[j] = rho;
            grid.inv_rho[j] = if j == 0 { 0.0 } else { w / (s * sg) };
            grid.g[j] = g;
            grid.hp[j] = if j == n { 1.0 } else { height.hp(rho) };
            grid.opg[j] = 2.0 - g;
            grid.hpp[j] = if j == n { 0.0 } else { height.hpp(rho) };
            grid.sp[j] = w * w / (s * one_s2);
            grid.sp2[j] = grid.sp[j] * grid.sp[j];
            grid.spp[j] = -2.0 * sg * w.powi(3) * (3.0 + sg * sg) / (s * s * one_s2.powi(3));
            grid.sp_over_g[j] = w.powf(1.0 - eta) * qa / (s * one_s2);
            grid.sp2_over_g[j] = w.powf(3.0 - eta) * qa / (s * s * one_s2 * one_s2);
            grid.spp_over_g[j] =
                -2.0 * sg * (3.0 + sg * sg) * w.powf(2.0 - eta) * qa / (s * s * one_s2.powi(3));
            grid.hpp_over_g[j] = (1.0 + eta) * s * sg * w / q;
            grid.r_over_g[j] = if j == n { f64::INFINITY } else { rho / g };
            grid.drho_dsigma[j] = if j == n {
                f64::INFINITY
            } else {
                s * one_s2 / (w * w)
            };
            let speed = grid.sp_over_g[j].max(grid.sp[j] / grid.opg[j]);
            grid.max_speed = grid.max_speed.max(speed);
        }
        Ok(grid)
    }

    pub fn scale(&self) -> f64 {
        self.map.scale
    }

    /// Node index at or just below `σ`.
    pub fn locate(&self, sigma: f64) -> usize {
        ((sigma * self.n as f64).floor() as usize).min(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::default_height;
    use approx::assert_relative_eq;

    #[test]
    fn regular_forms_match_direct_evaluation() {
        for &eta in &[1.0, 0.6] {
            let h = default_height(eta).unwrap();
            let m = CompactMap::new(1.5).unwrap();
            let grid = Grid::new(64, m, h).unwrap();
            for j in [1usize, 10, 32, 50, 62] {
                let rho = grid.rho[j];
                let sg = grid.sigma[j];
                let g = h.g(rho);
                assert_relative_eq!(grid.g[j], g, max_relative = 1e-12);
                assert_relative_eq!(grid.sp[j], m.jacobian(sg), max_relative = 1e-12);
                assert_relative_eq!(grid.sp_over_g[j], m.jacobian(sg) / g, max_relative = 1e-11);
                assert_relative_eq!(grid.hpp_over_g[j], h.hpp(rho) / g, max_relative = 1e-11);
                let d = 1e-6 * rho;
                let fd = (m.jacobian(m.sigma(rho + d)) - m.jacobian(m.sigma(rho - d))) / (2.0 * d);
                assert_relative_eq!(grid.spp[j], fd, max_relative = 1e-6);
                assert_relative_eq!(grid.spp_over_g[j], grid.spp[j] / g, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn scri_limits_for_eta_one() {
        let grid = Grid::new(64, CompactMap::new(1.5).unwrap(), default_height(1.0).unwrap()).unwrap();
        let n = grid.n;
        assert_eq!(grid.g[n], 0.0);
        assert_relative_eq!(grid.sp_over_g[n], 0.75, max_relative = 1e-14);
        assert_eq!(grid.sp2_over_g[n], 0.0);
        assert_eq!(grid.hpp_over_g[n], 0.0);
        assert_relative_eq!(grid.max_speed, 0.75, max_relative = 1e-12);
        assert!(grid.hp.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}
