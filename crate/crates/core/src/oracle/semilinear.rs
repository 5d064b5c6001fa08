//! The polynomial chain `ψ_(n) = Σ_{j=1}^{n+1} (−1)^{j−1} ψ^j / j!` that
//! improves the source of `□ψ = ∂^γψ∂_γψ` by one power of `ψ` per step.

use crate::error::{Error, Result};

pub const MAX_CHAIN_DEPTH: usize = 3;

/// Coefficients of `ψ^1, …, ψ^{n+1}` in `ψ_(n)`.
pub fn semilinear_coefficients(n: usize) -> Result<Vec<f64>> {
    if !(1..=MAX_CHAIN_DEPTH).contains(&n) {
        return Err(Error::Parameter(format!(
            "semilinear chain depth must be in 1..={MAX_CHAIN_DEPTH}, got {n}"
        )));
    }
    let mut fact = 1.0;
    Ok((1..=n + 1)
        .map(|j| {
            fact *= j as f64;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign / fact
        })
        .collect())
}

/// Evaluates `Σ cⱼ ψ^{j+1}` by Horner's rule.
pub fn chain_polynomial(coefficients: &[f64], psi: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| (acc + c) * psi)
}

/// `ψ_(n)` applied pointwise to `series`.
pub fn semilinear_transform(series: &[f64], n: usize) -> Result<Vec<f64>> {
    let c = semilinear_coefficients(n)?;
    Ok(series.iter().map(|&p| chain_polynomial(&c, p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_member() {
        let out = semilinear_transform(&[0.3, -0.1, 0.0], 1).unwrap();
        assert_relative_eq!(out[0], 0.3 - 0.045, epsilon = 1e-16);
        assert_relative_eq!(out[1], -0.1 - 0.005, epsilon = 1e-16);
        assert_eq!(out[2], 0.0);
    }

    #[test]
    fn depth_bounds() {
        assert!(semilinear_transform(&[0.1], 0).is_err());
        assert!(semilinear_transform(&[0.1], 4).is_err());
        assert_eq!(semilinear_coefficients(3).unwrap().len(), 4);
    }

    #[test]
    fn chain_approaches_one_minus_exp() {
        // ψ_(n) → 1 − e^{−ψ}; the map that linearizes the equation
        let psi = 0.2;
        let err = |n| (semilinear_transform(&[psi], n).unwrap()[0] - (1.0 - (-psi).exp())).abs();
        assert!(err(3) < err(2) && err(2) < err(1));
        assert!(err(3) < psi.powi(5) / 120.0 * 1.01);
    }
}
