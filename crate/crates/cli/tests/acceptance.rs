//! One test per acceptance criterion; each prints its PASS/FAIL line.

use modeloss::verify::{self, Outcome};

fn check(outcome: Outcome) {
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_1_sigmoid_tanh_identity() {
    let o = verify::tanh_identity();
    assert!(o.seconds < 1.0);
    check(o);
}

#[test]
fn criterion_2_perceptron_worked_example() {
    check(verify::perceptron_table());
}

#[test]
fn criterion_3_gap_spectrum_oracle() {
    let o = verify::gap_oracle();
    assert!(o.seconds < 5.0);
    check(o);
}

#[test]
fn criterion_3_rejects_a_sign_flipped_gap() {
    fn flipped(z: f64) -> f64 {
        -modeloss_core::spectral::gap(z)
    }
    let o = verify::gap_oracle_with(flipped);
    println!("{o}");
    assert!(!o.passed);
}

#[test]
fn criterion_4_commutator_dichotomy() {
    check(verify::commutator_dichotomy());
}

#[test]
fn criterion_5_reconstruction_endpoints() {
    check(verify::reconstruction_endpoints());
}

#[test]
fn criterion_6_thermal_occupation() {
    check(verify::thermal_occupation());
}

#[test]
fn criterion_7_gradient_check() {
    let o = verify::gradient_check();
    assert!(o.seconds < 10.0);
    check(o);
}

#[test]
fn criterion_8_learning_capability_degradation() {
    let o = verify::learning_degradation();
    assert!(o.seconds < 600.0);
    check(o);
}

#[test]
fn criterion_9_determinism() {
    check(verify::determinism());
}
