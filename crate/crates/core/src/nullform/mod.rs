//! Exact algebra of cubic null forms and their radial reduction.

mod classify;
mod poly;
mod radial;
mod tensor;

pub use classify::{classify, Classification, GeneratorWeight, SPAN_TOLERANCE};
pub use poly::{monomial_name, SpherePoly};
pub use radial::{
    evaluate_radial_rhs, radial_reduce, RadialNullForm, RadialSlots, RadiationJet, DEFAULT_R_MIN,
    U, UU, UV, V, VV,
};
pub use tensor::{
    check_null, generators, minkowski, p1_generator, p2_generator, p3_generator, parse_rational,
    validate_null, with_injected, Family, NullFormTensor,
};

use crate::error::{Error, Result};

/// Names accepted by [`preset`].
pub const PRESETS: &[&str] = &[
    "linear",
    "semilinear_null",
    "p1_box",
    "p2_alpha0",
    "p2_alpha1",
    "p2_alpha2",
    "p2_alpha3",
    "p3_012",
    "p3_radial",
];

/// A named nonlinearity: Cartesian tensor when one exists, and its radial form
/// when the form is compatible with spherical symmetry.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub tensor: Option<NullFormTensor>,
    pub radial: Result<RadialNullForm>,
}

/// `Q_{UV}(ψ, Uψ) = Uψ·UVψ − Vψ·UUψ`: a frame-antisymmetric (`P₃`-type) form
/// that survives the radial reduction with a nonzero tail coefficient.
pub fn p3_radial() -> RadialNullForm {
    RadialNullForm::new([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]], [0.0; 2], 0.0)
        .expect("null slots are zero")
}

/// `∂^γψ ∂_γψ = −Uψ Vψ`.
pub fn semilinear_null() -> RadialNullForm {
    RadialNullForm::new([[0.0; 3]; 2], [0.0; 2], -1.0).expect("null slots are zero")
}

pub fn preset(name: &str) -> Result<Preset> {
    let from_tensor = |t: NullFormTensor| Preset {
        name: name.to_string(),
        radial: radial_reduce(&t),
        tensor: Some(t),
    };
    let radial_only = |f: RadialNullForm| Preset {
        name: name.to_string(),
        tensor: None,
        radial: Ok(f),
    };
    Ok(match name {
        "linear" => from_tensor(NullFormTensor::zero()),
        "semilinear_null" => radial_only(semilinear_null()),
        "p1_box" => from_tensor(p1_generator(0)),
        "p2_alpha0" => from_tensor(p2_generator(0)),
        "p2_alpha1" => from_tensor(p2_generator(1)),
        "p2_alpha2" => from_tensor(p2_generator(2)),
        "p2_alpha3" => from_tensor(p2_generator(3)),
        "p3_012" => from_tensor(p3_generator(0, 1, 2)),
        "p3_radial" => radial_only(p3_radial()),
        other => {
            return Err(Error::Parameter(format!(
                "unknown null-form preset `{other}` (known: {})",
                PRESETS.join(", ")
            )))
        }
    })
}
