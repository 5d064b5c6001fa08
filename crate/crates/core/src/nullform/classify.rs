//! Decomposition of null forms over the classical generator families.

use super::tensor::{check_null, generators, Family, NullFormTensor};
use crate::error::Result;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Residual (relative to `max(1, ‖P‖)`) below which a form counts as lying in
/// the span of the `P₁ ∪ P₂` generators.
pub const SPAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub in_span_p1p2: bool,
    /// Least-squares residual of the restricted `P₁ ∪ P₂` solve.
    pub residual_norm: f64,
    /// Residual of the full `P₁ ∪ P₂ ∪ P₃` solve.
    pub full_residual_norm: f64,
    /// Minimum-norm coefficients over all generators (not unique).
    pub coefficients: Vec<GeneratorWeight>,
    /// `u`-exponent in `ψ ~ v⁻¹ u^q`: −2 for `P₁`/`P₂`-only forms, −1 otherwise.
    pub predicted_tail_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorWeight {
    pub family: Family,
    pub name: String,
    pub weight: f64,
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(b, 1e-12)
        .expect("SVD computed with both singular-vector sets");
    let r = (a * &x - b).norm();
    (x, r)
}

/// Classifies a null form; non-null input is rejected.
pub fn classify(p: &NullFormTensor) -> Result<Classification> {
    check_null(p)?;
    let gens = generators();
    let cols: Vec<Vec<f64>> = gens.iter().map(|(_, _, g)| g.to_f64()).collect();
    let a_full = DMatrix::from_fn(64, cols.len(), |i, j| cols[j][i]);
    let n12 = gens.iter().filter(|(f, _, _)| *f != Family::P3).count();
    let a_12 = a_full.columns(0, n12).into_owned();
    let b = DVector::from_vec(p.to_f64());
    let scale = b.norm().max(1.0);

    let (x, r_full) = least_squares(&a_full, &b);
    let (_, r_12) = least_squares(&a_12, &b);
    let residual_norm = r_12 / scale;
    let in_span = residual_norm < SPAN_TOLERANCE;
    Ok(Classification {
        in_span_p1p2: in_span,
        residual_norm,
        full_residual_norm: r_full / scale,
        coefficients: gens
            .iter()
            .zip(x.iter())
            .map(|((family, name, _), &weight)| GeneratorWeight {
                family: *family,
                name: name.clone(),
                weight,
            })
            .collect(),
        predicted_tail_exponent: if in_span { -2.0 } else { -1.0 },
    })
}
