//! Convergence order and extrapolated limit from three refinement levels.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub order: f64,
    pub extrapolated: f64,
}

/// From values at resolutions `N, 2N, 4N`: `p = log₂(Δ₁/Δ₂)` with
/// `Δ₁ = v_N − v_{2N}`, `Δ₂ = v_{2N} − v_{4N}`, and the limit
/// `v_{4N} − Δ₂/(2^p − 1)`.
pub fn richardson(values: [f64; 3]) -> Result<Richardson> {
    let [a, b, c] = values;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotAsymptotic(format!("non-finite value in {values:?}")));
    }
    let d1 = a - b;
    let d2 = b - c;
    if d1 == 0.0 && d2 == 0.0 {
        return Ok(Richardson {
            order: f64::INFINITY,
            extrapolated: c,
        });
    }
    if d1 * d2 <= 0.0 || d2.abs() >= d1.abs() {
        return Err(Error::NotAsymptotic(format!(
            "differences {d1:e}, {d2:e} are not monotonically shrinking"
        )));
    }
    let order = (d1 / d2).log2();
    Ok(Richardson {
        order,
        extrapolated: c - d2 / (2f64.powf(order) - 1.0),
    })
}

/// Observed orders `log₂(e_N/e_{2N})` of a sequence of errors on grids refined
/// by factors of two.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn synthetic_fourth_order() {
        let v = |n: f64| 1.25 + 3.0 * n.powi(-4);
        let r = richardson([v(16.0), v(32.0), v(64.0)]).unwrap();
        assert_relative_eq!(r.order, 4.0, epsilon = 1e-9);
        assert_relative_eq!(r.extrapolated, 1.25, epsilon = 1e-14);
    }

    #[test]
    fn oscillating_sequence_is_rejected() {
        assert!(matches!(richardson([1.0, 1.1, 1.05]), Err(Error::NotAsymptotic(_))));
        assert!(matches!(richardson([1.0, 1.1, 1.3]), Err(Error::NotAsymptotic(_))));
    }

    #[test]
    fn orders_of_errors() {
        let o = observed_orders(&[1e-2, 6.25e-4, 3.90625e-5]);
        assert_relative_eq!(o[0], 4.0, epsilon = 1e-12);
        assert_relative_eq!(o[1], 4.0, epsilon = 1e-12);
    }
}
