//! One test per acceptance criterion. Each prints a PASS/FAIL line to stderr
//! (uncaptured) before asserting.

use std::io::Write;
use std::sync::Mutex;

use decolab::acceptance::{self, AcceptanceConfig, CheckOutcome};

// Criteria 8 and 10 time themselves, so checks never overlap.
static SERIAL: Mutex<()> = Mutex::new(());

fn run(check: impl FnOnce() -> CheckOutcome) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let outcome = check();
    let _ = writeln!(std::io::stderr(), "{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_01_ghz_dephasing_closed_form() {
    run(acceptance::check_ghz_dephasing);
}

#[test]
fn criterion_02_ghz_bit_flip_closed_form() {
    run(acceptance::check_ghz_bit_flip);
}

#[test]
fn criterion_03_ghz_pauli_y_closed_form() {
    run(acceptance::check_ghz_pauli_y);
}

#[test]
fn criterion_04_ghz_depolarizing_closed_form() {
    run(acceptance::check_ghz_depolarizing);
}

#[test]
fn criterion_05_w_dephasing_closed_form() {
    run(acceptance::check_w_dephasing);
}

#[test]
fn criterion_06_w_bit_and_phase_flip_agree() {
    run(acceptance::check_w_x_y_agree);
}

#[test]
fn criterion_07_ghz_w_ordering() {
    run(acceptance::check_ordering);
}

#[test]
fn criterion_08_rk4_matches_closed_forms() {
    run(|| acceptance::check_integrator(AcceptanceConfig::default().dt));
}

#[test]
fn criterion_09_numerical_ranks() {
    run(acceptance::check_ranks);
}

#[test]
fn criterion_10_convex_roof_coincidence() {
    let config = AcceptanceConfig::default();
    run(|| acceptance::check_roof(config.seed, config.restarts));
}

#[test]
fn criterion_11_ppt_persistence() {
    run(acceptance::check_ppt_persistence);
}

#[test]
fn criterion_12_pure_state_anchors() {
    run(acceptance::check_pure_anchors);
}

#[test]
fn criterion_13_curve_determinism() {
    run(acceptance::check_curve_determinism);
}
