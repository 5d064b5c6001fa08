use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn tailwave(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailwave"))
        .args(args)
        .current_dir(dir)
        .env_remove("TAILWAVE_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, json: &str) -> String {
    std::fs::write(dir.join(name), json).unwrap();
    name.to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"{"n": 64, "tau_final": 20, "cadence": 0.5, "null_form": "p3_radial",
    "data": {"family": "compact_bump", "amplitude": 0.05}, "energies": [{"k": 0, "p": 1}]}"#;

#[test]
fn classify_p2_preset() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tailwave(&["classify", "--preset", "p2_alpha0"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classification"]["in_span_p1p2"], true);
    assert_eq!(v["classification"]["predicted_tail_exponent"], -2.0);
}

#[test]
fn config_errors_exit_one_with_key_path() {
    let tmp = tempfile::tempdir().unwrap();
    let eta = write(
        tmp.path(),
        "eta.json",
        r#"{"eta": 1.5, "null_form": "linear", "data": {"family": "compact_bump", "amplitude": 0.1}}"#,
    );
    let o = tailwave(&["evolve", "--config", &eta], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("eta"), "{}", stderr(&o));

    let typo = write(
        tmp.path(),
        "typo.json",
        r#"{"null_form": "linear", "data": {"family": "compact_bump", "amplitude": 0.1}, "cadance": 1}"#,
    );
    let o = tailwave(&["evolve", "--config", &typo], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cadance"), "{}", stderr(&o));

    let o = tailwave(&["evolve"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn hyperbolicity_loss_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "h.json",
        r#"{"n": 128, "tau_final": 5, "null_form": "p2_alpha0", "data": {"family": "compact_bump", "amplitude": 0.05}}"#,
    );
    let o = tailwave(&["evolve", "--config", &cfg, "--out", "h"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("hyperbolicity"));
    // the partial run is still persisted
    let s: Value = serde_json::from_slice(&std::fs::read(tmp.path().join("h/summary.json")).unwrap()).unwrap();
    assert!(s["abort"].as_str().unwrap().contains("hyperbolicity"));
}

#[test]
fn evolve_is_deterministic_and_summary_is_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", SMALL);
    for out in ["a", "b"] {
        let o = tailwave(&["evolve", "--config", &cfg, "--out", out], tmp.path());
        // under-resolved: exit 0, fits flagged
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["diagnostics.csv", "snapshot_initial.csv", "snapshot_final.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical runs");
    }
    let csv = std::fs::read_to_string(tmp.path().join("a/diagnostics.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "tau,probe_rho,psi,Psi_scri,VPsi_scri,r3source_scri,E0_k,E0_p,E0_value"
    );
    // 41 slices × 2 probes
    assert_eq!(csv.lines().count(), 1 + 41 * 2);

    let s: Value = serde_json::from_slice(&std::fs::read(tmp.path().join("a/summary.json")).unwrap()).unwrap();
    let hash = s["manifest"]["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(s["report"]["config_hash"], hash);
    assert_eq!(s["report"]["passed"], false);
    assert!(s["report"]["window"].is_array());
    assert!(s["report"]["tolerances"]["lpi"].is_number());
    assert_eq!(s["manifest"]["mode"], "evolve");
}

#[test]
fn verify_linear_huygens_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tailwave(&["verify", "--scenario", "linear_huygens", "--out", "v"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS  2 linear_huygens"));
    assert!(tmp.path().join("v/verify.json").exists());
}

#[test]
fn verify_reports_failure_with_code_three() {
    let tmp = tempfile::tempdir().unwrap();
    // the convergence scenario's 1e-7 target is out of reach at N = 1024
    let o = tailwave(&["verify", "--scenario", "linear_convergence"], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = tailwave(&["verify", "--scenario", "no_such"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_check_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tailwave(&["oracle-check", "--out", "o"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(!String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn sweep_writes_one_summary_per_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = format!(r#"{{"base": {SMALL}, "amplitudes": [0.02, 0.05], "forms": ["p3_radial", "linear"]}}"#);
    let cfg = write(tmp.path(), "s.json", &spec);
    let o = Command::new(env!("CARGO_BIN_EXE_tailwave"))
        .args(["sweep", "--config", &cfg, "--out", "s"])
        .current_dir(tmp.path())
        .env("TAILWAVE_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let idx: Value = serde_json::from_slice(&std::fs::read(tmp.path().join("s/sweep.json")).unwrap()).unwrap();
    let cells = idx["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4);
    for c in cells {
        let dir = Path::new(c["dir"].as_str().unwrap());
        assert!(tmp.path().join(dir).join("summary.json").exists());
    }
}
