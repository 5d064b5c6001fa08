use approx::assert_relative_eq;
use proptest::prelude::*;
use tailwave_core::oracle::{
    chain_polynomial, exact_linear_radial, exact_radiation_field, kirchhoff_eval, richardson,
    semilinear_coefficients, semilinear_transform, ModelSource, ProfileFunction, RadialSource,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn richardson_recovers_synthetic_order(p in 1.0f64..6.0, l in -2.0f64..2.0, c in 0.1f64..5.0) {
        let v = [8.0, 16.0, 32.0].map(|n: f64| l + c * n.powf(-p));
        let r = richardson(v).unwrap();
        prop_assert!((r.order - p).abs() < 1e-6);
        prop_assert!((r.extrapolated - l).abs() < 1e-9);
    }

    #[test]
    fn radiation_field_is_annihilated_by_uv(u in -1.0f64..5.0, dv in 0.0f64..4.0) {
        let f = ProfileFunction::new(1.0, 2.0, 1.5);
        let v = u + dv;
        let h = 1e-3;
        let p = |u: f64, v: f64| exact_radiation_field(&f, u, v).0;
        let uv = (p(u + h, v + h) - p(u + h, v - h) - p(u - h, v + h) + p(u - h, v - h)) / (4.0 * h * h);
        prop_assert!(uv.abs() < 1e-8);
    }

    #[test]
    fn chain_without_higher_terms_is_identity(x in -1.0f64..1.0) {
        prop_assert_eq!(chain_polynomial(&[1.0], x), x);
    }

    #[test]
    fn chain_is_odd_part_plus_even_part(x in -0.5f64..0.5) {
        // ψ_(n)(ψ) − ψ_(n)(−ψ) keeps only odd powers
        let c = semilinear_coefficients(3).unwrap();
        let odd = chain_polynomial(&c, x) - chain_polynomial(&c, -x);
        prop_assert!((odd - 2.0 * (x + x.powi(3) / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn kirchhoff_is_linear(k in -3.0f64..3.0, t in 3.0f64..8.0) {
        let scaled = Scaled(k);
        let a = kirchhoff_eval(&ModelSource, t, 0.5, 0.0).unwrap().value;
        let b = kirchhoff_eval(&scaled, t, 0.5, 0.0).unwrap().value;
        prop_assert!((b - k * a).abs() <= 1e-8 * a.abs().max(1e-300) * k.abs().max(1.0));
    }
}

/// `k·ModelSource`, keeping its support.
struct Scaled(f64);

impl RadialSource for Scaled {
    fn value(&self, t: f64, r: f64) -> f64 {
        self.0 * ModelSource.value(t, r)
    }

    fn outer_radius(&self, t: f64) -> f64 {
        ModelSource.outer_radius(t)
    }
}

#[test]
fn linear_radial_solution_matches_radiation_field() {
    let f = ProfileFunction::new(0.7, 2.0, 1.5);
    for &(t, r) in &[(1.0, 0.5), (3.0, 2.0), (2.5, 4.0)] {
        let (psi, _) = exact_radiation_field(&f, t - r, t + r);
        assert_relative_eq!(exact_linear_radial(&f, t, r) * r, psi, max_relative = 1e-12);
    }
}

#[test]
fn kirchhoff_of_a_free_solution_source_is_zero() {
    let v = kirchhoff_eval(&|_: f64, _: f64| 0.0, 9.0, 2.0, 1.0).unwrap();
    assert_eq!(v.value, 0.0);
}

#[test]
fn transform_applies_pointwise() {
    let s = semilinear_transform(&[0.1, -0.2], 1).unwrap();
    assert_relative_eq!(s[0], 0.1 - 0.005, max_relative = 1e-14);
    assert_relative_eq!(s[1], -0.2 - 0.02, max_relative = 1e-14);
    assert!(semilinear_transform(&[0.1], 4).is_err());
}
