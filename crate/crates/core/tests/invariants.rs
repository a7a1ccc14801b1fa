//! Cross-module properties: tuner objective consistency, closed-form error
//! curves, the minimax crossing, restriction behavior and parser round trips.

use proptest::prelude::*;
use qquery::analyzer::{error_report, max_error, run_exact};
use qquery::blackbox::{FunctionTransform, Property, TruthTable};
use qquery::circuit::{parse_program, restrict_program, serialize_program, Builtin};
use qquery::tuner::{andor2_orbit_formulas, closed_form_constants, objective, tune_theta};

fn tt(s: &str) -> TruthTable {
    s.parse().unwrap()
}

#[test]
fn andor2_error_curves_match_closed_forms() {
    for k in 0..100 {
        let theta = -1.5 + 3.0 * k as f64 / 99.0;
        let p = Builtin::AndOr2.program(theta);
        let (want_0001, want_0101) = andor2_orbit_formulas(theta);
        let got_0001 = run_exact(&p, &tt("0001")).unwrap().error_against(false);
        let got_0101 = run_exact(&p, &tt("0101")).unwrap().error_against(true);
        assert!((got_0001 - want_0001).abs() < 1e-12, "theta {theta}");
        assert!((got_0101 - want_0101).abs() < 1e-12, "theta {theta}");
    }
}

#[test]
fn objective_is_the_report_maximum() {
    for theta in [-0.7, 0.0, 0.074909, 0.3, 1.2] {
        let g = objective(Builtin::AndOr2, &Property::ANDOR2, theta).unwrap();
        let r = error_report(&Builtin::AndOr2.program(theta), &Property::ANDOR2).unwrap();
        assert_eq!(g.to_bits(), r.p_error_max.to_bits());
    }
}

#[test]
fn active_curves_cross_at_the_optimum() {
    let t = tune_theta(Builtin::AndOr2, &Property::ANDOR2, -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2).unwrap();
    let k = closed_form_constants();
    assert!((t.theta_star - k.andor_theta).abs() < 1e-7);
    assert!((t.p_error_max - k.andor_p_error).abs() < 1e-9);
    let (a, b) = andor2_orbit_formulas(t.theta_star);
    assert!((a - b).abs() < 1e-6);
    let (a, b) = andor2_orbit_formulas(t.theta_star - 0.01);
    assert!((a - b).abs() > 1e-4);
    assert!(t.equalized);
    assert_eq!(t.active_orbits, vec![tt("0001"), tt("0101")]);
}

#[test]
fn or_tuning_matches_closed_form() {
    let t = tune_theta(Builtin::Or, &Property::OR, 0.0, std::f64::consts::TAU).unwrap();
    let k = closed_form_constants();
    assert!((t.theta_star - k.or_theta).abs() < 1e-6);
    assert!(t.theta_star.cos() < 0.0);
}

#[test]
fn restriction_at_the_optimum_is_not_or_at_the_same_angle() {
    let theta = closed_form_constants().andor_theta;
    let r = restrict_program(&Builtin::AndOr2.program(theta), 1, false).unwrap();
    let dual = FunctionTransform::Chain(vec![r.transform.clone(), FunctionTransform::Complement]);
    let same = qquery::analyzer::equivalent_behavior(&r.program, &r.transform, &Builtin::Or.program(theta), &dual, true).unwrap();
    assert!(same.max_deviation > 1e-3);
    let opposite = qquery::analyzer::equivalent_behavior(&r.program, &r.transform, &Builtin::Or.program(-theta), &dual, true).unwrap();
    assert!(opposite.max_deviation < 1e-12);
}

#[test]
fn qubit_one_restriction_fixes_the_second_input_bit() {
    // Restricting qubit 1 to x must see g(y) = f(y x); the other position fails.
    let theta = 0.0;
    for x in [false, true] {
        let r = restrict_program(&Builtin::AndOr2.program(theta), 1, x).unwrap();
        assert_eq!(r.transform, FunctionTransform::Marginal { position: 1, value: x });
        let wrong = FunctionTransform::Marginal { position: 0, value: x };
        let dual_ok = FunctionTransform::Chain(vec![r.transform.clone(), FunctionTransform::Complement]);
        let ok = qquery::analyzer::equivalent_behavior(&r.program, &r.transform, &Builtin::Or.program(0.0), &dual_ok, true).unwrap();
        assert!(ok.equal);
        let mut worst = 0.0f64;
        for f in TruthTable::all(2).unwrap() {
            let a = run_exact(&r.program, &f.apply(&r.transform).unwrap()).unwrap();
            let b = run_exact(&r.program, &f.apply(&wrong).unwrap()).unwrap();
            worst = worst.max(a.total_variation(&b));
        }
        assert!(worst > 0.1);
    }
}

#[test]
fn builtins_round_trip_through_text() {
    for b in Builtin::ALL {
        for theta in [0.0, 0.074909, -2.5, 1e-7] {
            let p = b.program(theta);
            let text = serialize_program(&p);
            let q = parse_program(&text).unwrap();
            assert_eq!(q, p, "{}", b.name());
            assert_eq!(serialize_program(&q), text);
        }
    }
}

proptest! {
    #[test]
    fn error_probabilities_are_probabilities(theta in -7.0f64..7.0) {
        for b in Builtin::ALL {
            let p = b.program(theta);
            let prop = b.property();
            let r = error_report(&p, &prop).unwrap();
            for f in &r.per_function {
                prop_assert!((f.distribution.total() - 1.0).abs() < 1e-9);
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f.p_error));
            }
            prop_assert_eq!(max_error(&p, &prop).unwrap().to_bits(), r.p_error_max.to_bits());
        }
    }
}
