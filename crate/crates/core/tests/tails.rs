use proptest::prelude::*;
use tailwave_core::config::{NullFormSpec, RunConfig};
use tailwave_core::evolver::{InitialDataSpec, Velocity};
use tailwave_core::tails::{fit_power_index, fit_scri_amplitude, local_power_index, verify_prediction};

fn power_law(a: f64, q: f64, t0: f64, t1: f64) -> Vec<(f64, f64)> {
    (0..200)
        .map(|i| {
            let t = t0 * (t1 / t0).powf(i as f64 / 199.0);
            (t, a * t.powf(q))
        })
        .collect()
}

proptest! {
    #[test]
    fn fit_recovers_exact_power_law(a in 1e-6f64..1e2, q in -5.0f64..-0.5, neg in any::<bool>()) {
        let a = if neg { -a } else { a };
        let f = fit_power_index(&power_law(a, q, 10.0, 500.0), (20.0, 400.0), 0.0).unwrap();
        prop_assert!((f.slope - q).abs() < 1e-9);
        prop_assert!((f.intercept - a.abs().ln()).abs() < 1e-8);
    }

    #[test]
    fn lpi_is_exact_on_power_laws(a in 1e-3f64..1e3, q in -5.0f64..0.0) {
        for s in local_power_index(&power_law(a, q, 1.0, 100.0), 0.0) {
            prop_assert!((s.lpi.unwrap() - q).abs() < 1e-9);
        }
    }

    #[test]
    fn lpi_masks_sign_changes_and_quiet_samples(floor in 1e-8f64..1e-2) {
        let series: Vec<(f64, f64)> = (1..100).map(|i| {
            let t = i as f64;
            (t, (0.3 * t).sin() * 1e-3)
        }).collect();
        for s in local_power_index(&series, floor) {
            if s.sign_change {
                prop_assert!(s.lpi.is_none());
            }
        }
    }

    #[test]
    fn scri_fit_recovers_coefficient_and_shift(c in -1.0f64..1.0, s in -5.0f64..5.0, e in -0.5f64..0.5) {
        prop_assume!(c.abs() > 1e-3);
        let offset = std::f64::consts::FRAC_PI_2;
        // 2uΨ_scri = (c + e·u^{-1/2})·u/(u−s)
        let series: Vec<(f64, f64)> = (20..=300).map(|t| {
            let tau = t as f64;
            let u = tau - offset;
            (tau, (c + e * u.powf(-0.5)) / (2.0 * (u - s)))
        }).collect();
        let fit = fit_scri_amplitude(&series, offset, (30.0, 300.0), Some(0.5), 1e-12).unwrap();
        prop_assert!((fit.c_total - c).abs() < 1e-7 * (1.0 + c.abs()));
        prop_assert!((fit.origin_shift - s).abs() < 1e-4);
        prop_assert!((fit.remainder.unwrap() - e).abs() < 1e-5);
        prop_assert!(fit.drift < 1e-6);
    }

    #[test]
    fn flipping_the_sign_flips_the_coefficient(c in 0.01f64..1.0) {
        let offset = std::f64::consts::FRAC_PI_2;
        let series = |sgn: f64| -> Vec<(f64, f64)> {
            (20..=200).map(|t| (t as f64, sgn * c / (2.0 * (t as f64 - offset - 1.0)))).collect()
        };
        let p = fit_scri_amplitude(&series(1.0), offset, (30.0, 200.0), None, 1e-12).unwrap();
        let m = fit_scri_amplitude(&series(-1.0), offset, (30.0, 200.0), None, 1e-12).unwrap();
        prop_assert!((p.c_total + m.c_total).abs() < 1e-12);
    }
}

#[test]
fn fit_rejects_sign_changes_and_sparse_windows() {
    let osc: Vec<(f64, f64)> = (1..200).map(|t| (t as f64, (t as f64).sin())).collect();
    assert!(fit_power_index(&osc, (10.0, 190.0), 0.0).is_err());
    let law = power_law(1.0, -2.0, 10.0, 500.0);
    assert!(fit_power_index(&law, (10.0, 10.5), 0.0).is_err());
    assert!(fit_power_index(&law, (10.0, 500.0), 1.0).is_err());
}

#[test]
fn linear_noncompact_tail_is_set_by_the_data() {
    // no source: c_scri = 0 and the fixed-r tail is c_init/(uv)
    let data = InitialDataSpec::NoncompactTail {
        c_init: 0.3,
        delta_id: 0.5,
        amplitude: 0.05,
        center: 2.0,
        width: 1.5,
        velocity: Velocity::TimeSymmetric,
    };
    let mut cfg = RunConfig::new(NullFormSpec::Preset("linear".into()), data);
    cfg.n = 512;
    cfg.tau_final = 200.0;
    cfg.cadence = 1.0;
    let report = verify_prediction(&tailwave_core::evolve(&cfg).unwrap()).unwrap();
    assert!(report.c_scri.value.abs() < 1e-12, "{:?}", report.c_scri);
    assert!(report.mismatch < 0.05, "measured {} vs {}", report.c_total_measured, report.c_init);
    let lpi = report.probes[0].fit.expect("fitted").slope;
    assert!((lpi + 2.0).abs() < 0.1, "lpi {lpi}");
}
