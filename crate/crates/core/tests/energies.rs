use proptest::prelude::*;
use std::sync::OnceLock;
use tailwave_core::config::{NullFormSpec, RunConfig};
use tailwave_core::energies::{fit_decay_rate, rp_energy, rp_energy_breakdown, EnergySpec};
use tailwave_core::evolver::{build_evolver, evolve, Evolver, InitialDataSpec, Velocity};
use tailwave_core::GridState;

fn slice() -> &'static (Evolver, GridState) {
    static S: OnceLock<(Evolver, GridState)> = OnceLock::new();
    S.get_or_init(|| {
        let data = InitialDataSpec::CompactBump {
            amplitude: 0.05,
            center: 2.0,
            width: 1.5,
            velocity: Velocity::TimeSymmetric,
        };
        let mut cfg = RunConfig::new(NullFormSpec::Preset("p3_radial".into()), data);
        cfg.n = 256;
        cfg.tau_final = 20.0;
        cfg.cadence = 20.0;
        let run = evolve(&cfg).unwrap();
        (build_evolver(&cfg).unwrap(), run.final_state)
    })
}

fn energy(k: usize, p: f64) -> f64 {
    let (ev, st) = slice();
    rp_energy(ev, st, &EnergySpec::new(k, p, 1.0).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energies_are_positive(k in 0usize..=2, p in 0.0f64..2.9) {
        prop_assert!(energy(k, p) > 0.0);
    }

    #[test]
    fn outer_part_grows_with_weight(p in 0.0f64..2.8, dp in 0.01f64..0.2) {
        let (ev, st) = slice();
        let outer = |p: f64| rp_energy_breakdown(ev, st, &EnergySpec::new(0, p, 1.0).unwrap()).unwrap().outer;
        prop_assert!(outer(p + dp) >= outer(p));
    }

    #[test]
    fn weight_interpolation_is_log_convex(p0 in 0.0f64..1.4, p1 in 1.5f64..2.9, theta in 0.0f64..1.0) {
        // E_p ≤ E_{p0}^{1−θ} E_{p1}^θ for p = (1−θ)p0 + θp1
        let p = (1.0 - theta) * p0 + theta * p1;
        let bound = energy(0, p0).powf(1.0 - theta) * energy(0, p1).powf(theta);
        prop_assert!(energy(0, p) <= bound * (1.0 + 1e-10));
    }

    #[test]
    fn higher_order_dominates(p in 0.0f64..2.9) {
        // E^1 contains every word of E^0
        prop_assert!(energy(1, p) >= energy(0, p));
    }
}

#[test]
fn weights_outside_range_are_rejected() {
    assert!(EnergySpec::new(0, 3.0, 1.0).is_err());
    assert!(EnergySpec::new(0, -0.1, 1.0).is_err());
    assert!(EnergySpec::new(3, 1.0, 1.0).is_err());
}

#[test]
fn decay_fit_of_exact_power_law() {
    let s: Vec<(f64, f64)> = (10..=100).map(|t| (t as f64, 4.0 * (t as f64).powf(-1.5))).collect();
    let f = fit_decay_rate(&s, (10.0, 100.0)).unwrap();
    assert!((f.slope + 1.5).abs() < 1e-12);
    assert!((f.intercept - 4f64.ln()).abs() < 1e-10);
}
