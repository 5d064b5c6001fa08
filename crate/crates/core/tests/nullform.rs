use num_rational::BigRational;
use num_traits::FromPrimitive;
use proptest::prelude::*;
use tailwave_core::nullform::{
    classify, generators, radial_reduce, validate_null, with_injected, Family, NullFormTensor,
};

fn combination(weights: &[i64], families: &[Family]) -> NullFormTensor {
    generators()
        .iter()
        .filter(|g| families.contains(&g.0))
        .zip(weights.iter().cycle())
        .fold(NullFormTensor::zero(), |acc, (g, &w)| {
            acc.add(&g.2.scale(&BigRational::from_i64(w).unwrap()))
        })
}

proptest! {
    #[test]
    fn integer_combinations_are_null(w in prop::collection::vec(-4i64..=4, 32)) {
        prop_assert!(validate_null(&combination(&w, &[Family::P1, Family::P2, Family::P3])));
    }

    #[test]
    fn p1_p2_combinations_stay_in_span(w in prop::collection::vec(-4i64..=4, 8)) {
        let t = combination(&w, &[Family::P1, Family::P2]);
        prop_assert!(classify(&t).unwrap().in_span_p1p2);
    }

    #[test]
    fn a_p3_component_leaves_the_span(w in prop::collection::vec(-4i64..=4, 8), k in 1usize..24, s in prop::sample::select(vec![-2i64, -1, 1, 2])) {
        let p3 = &generators()[8 + k - 1].2;
        let t = combination(&w, &[Family::P1, Family::P2]).add(&p3.scale(&BigRational::from_i64(s).unwrap()));
        let c = classify(&t).unwrap();
        prop_assert!(!c.in_span_p1p2);
        prop_assert_eq!(c.predicted_tail_exponent, -1.0);
    }

    #[test]
    fn injected_monomials_are_rejected(w in prop::collection::vec(-4i64..=4, 32), a in 0usize..4, b in 0usize..4, c in 0usize..4, k in prop::sample::select(vec![-3i64, -1, 1, 2])) {
        let t = combination(&w, &[Family::P1, Family::P2, Family::P3]);
        prop_assert!(!validate_null(&with_injected(&t, a, b, c, k)));
        prop_assert!(classify(&with_injected(&t, a, b, c, k)).is_err());
    }
}

#[test]
fn radial_p1_p2_forms_have_no_slow_tail() {
    for (family, name, t) in generators() {
        if family == Family::P3 {
            continue;
        }
        if let Ok(r) = radial_reduce(&t) {
            assert!(r.tail_coefficient().abs() < 1e-14, "{name}");
        }
    }
}
