//! Acceptance criteria: one PASS/FAIL line per criterion on stdout.
//!
//! Targets with an understood, documented limitation are printed as failing
//! but only unexplained failures fail the test.

use std::io::Write;
use tailwave_core::scenarios::{run_scenario, SCENARIOS};

#[test]
fn acceptance_criteria() {
    // written past the test harness's capture so the lines always show
    let mut out = std::io::stdout().lock();
    // libtest has already printed "test acceptance_criteria ... " without a newline
    writeln!(out).unwrap();
    let mut regressions = Vec::new();
    for name in SCENARIOS {
        let start = std::time::Instant::now();
        let check = run_scenario(name).expect("scenario exists");
        writeln!(out, "{}  ({:.1}s)", check.line(), start.elapsed().as_secs_f64()).unwrap();
        out.flush().unwrap();
        for p in check.regressions() {
            regressions.push(format!("{} {}: {}", check.criterion, p.label, p.detail));
        }
    }
    assert!(regressions.is_empty(), "unexplained failures:\n{}", regressions.join("\n"));
}
