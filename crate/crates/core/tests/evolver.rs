use tailwave_core::config::{NullFormSpec, RunConfig};
use tailwave_core::evolver::{evolve, InitialDataSpec, Velocity};
use tailwave_core::oracle::richardson;

fn pulse(form: &str, amplitude: f64, n: usize, tau_final: f64) -> RunConfig {
    let data = InitialDataSpec::CompactBump {
        amplitude,
        center: 2.0,
        width: 1.5,
        velocity: Velocity::TimeSymmetric,
    };
    let mut cfg = RunConfig::new(NullFormSpec::Preset(form.into()), data);
    cfg.n = n;
    cfg.tau_final = tau_final;
    cfg.cadence = tau_final / 20.0;
    cfg.probes = vec![5.0];
    cfg
}

#[test]
fn quasilinear_probe_self_converges_at_fourth_order() {
    let values: Vec<[f64; 2]> = [128, 256, 512]
        .iter()
        .map(|&n| {
            let mut cfg = pulse("p3_radial", 0.01, n, 20.0);
            cfg.dissipation = 0.0;
            let run = evolve(&cfg).unwrap();
            let last = run.rows.last().unwrap();
            [last.probe_psi[0], last.psi_scri]
        })
        .collect();
    #[allow(clippy::needless_range_loop)]
    for k in 0..2 {
        let r = richardson([values[0][k], values[1][k], values[2][k]]).unwrap();
        assert!(r.order >= 3.5, "order {} for series {k}", r.order);
    }
}

#[test]
fn identical_configs_give_identical_runs() {
    let cfg = pulse("p3_radial", 0.05, 128, 10.0);
    let a = evolve(&cfg).unwrap();
    let b = evolve(&cfg).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.final_state, b.final_state);
    assert_eq!(a.config_hash, b.config_hash);
}

#[test]
fn linear_energy_drop_converges_to_scri_flux() {
    // max over slices of |E(0) − E(τ) − ∫|UΨ|²dτ| / E(0)
    let imbalance = |n: usize| {
        let mut cfg = pulse("linear", 1.0, n, 12.0);
        cfg.dissipation = 0.0;
        let run = evolve(&cfg).unwrap();
        let e0 = run.rows[0].standard_energy;
        let last = run.rows.last().unwrap();
        // the pulse has left: everything radiated
        assert!(last.standard_energy < 1e-10 * e0);
        run.rows
            .iter()
            .map(|r| (e0 - r.standard_energy - r.flux_integral).abs() / e0)
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (imbalance(256), imbalance(512));
    assert!(fine < 1e-4, "imbalance {fine:e}");
    assert!(coarse / fine > 8.0, "imbalance {coarse:e} -> {fine:e}");
}

#[test]
fn sign_flip_of_data_flips_linear_solution() {
    let a = evolve(&pulse("linear", 0.3, 128, 5.0)).unwrap();
    let b = evolve(&pulse("linear", -0.3, 128, 5.0)).unwrap();
    for (x, y) in a.final_state.psi.iter().zip(&b.final_state.psi) {
        assert_eq!(*x, -*y);
    }
}

#[test]
fn quadratic_source_is_even_in_amplitude() {
    // ψ(−ε) + ψ(ε) = 2ε²ψ₂ + O(ε⁴): the even part scales like ε²
    let even = |eps: f64| {
        let a = evolve(&pulse("p3_radial", eps, 128, 10.0)).unwrap();
        let b = evolve(&pulse("p3_radial", -eps, 128, 10.0)).unwrap();
        a.final_state.psi[64] + b.final_state.psi[64]
    };
    let ratio = even(0.02) / even(0.01);
    assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
}
