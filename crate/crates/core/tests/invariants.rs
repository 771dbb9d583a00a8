mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use proptest::prelude::*;
use wlw_core::classifier::catenoid_asymptote;
use wlw_core::{first_integral_m, principal_curvatures, IntegrationControls, Params};

#[test]
fn reflection_covariance() {
    for (a, b, x0, th) in COVARIANCE_CASES {
        let r = reflection_residual(a, b, x0, th, 40.0);
        assert!(r < 1e-8, "({a}, {b}, {x0}, {th}): {r:e}");
    }
}

#[test]
fn homothety_covariance() {
    for (a, b, x0, th) in COVARIANCE_CASES {
        for lambda in [0.5, 3.0] {
            let r = homothety_residual(a, b, x0, th, lambda, 40.0);
            assert!(r < 1e-8, "({a}, {b}, {x0}, {th}) x {lambda}: {r:e}");
        }
    }
}

#[test]
fn weingarten_relation_holds_along_samples() {
    let p = Params::new(-2.0, 1.0).unwrap();
    let t = solve(-2.0, 1.0, 4.0, FRAC_PI_2, 30.0);
    for st in &t.samples {
        let (k1, k2) = principal_curvatures(&p, st).unwrap();
        assert!((k1 - (-2.0 * k2 + 1.0)).abs() < 1e-12);
    }
}

#[test]
fn arclength_parametrization() {
    // Chord length between consecutive dense points never exceeds the arclength
    // step and approaches it as the spacing shrinks.
    let t = solve(3.0, 1.0, 4.0, 3.0 * FRAC_PI_2, 30.0);
    let n = 20_000;
    let (lo, hi) = (t.s_min(), t.s_max());
    let h = (hi - lo) / n as f64;
    let mut length = 0.0;
    let mut prev = t.state_at(lo).unwrap();
    for k in 1..=n {
        let st = t.state_at(lo + h * k as f64).unwrap();
        let chord = (st.x - prev.x).hypot(st.z - prev.z);
        assert!(chord <= h * (1.0 + 1e-7));
        length += chord;
        prev = st;
    }
    assert!(((hi - lo) - length).abs() < 1e-6 * (hi - lo));
}

#[test]
fn integration_is_deterministic() {
    let a = solve(-2.0, 1.0, 4.0, FRAC_PI_2, 100.0);
    let b = solve(-2.0, 1.0, 4.0, FRAC_PI_2, 100.0);
    assert_eq!(a.samples, b.samples);
    assert_eq!(a.events, b.events);
}

#[test]
fn first_integral_drift_below_tolerance() {
    let tight = IntegrationControls::default().with_tolerances(1e-12, 1e-13).with_max_arclength(100.0);
    for a in [-2.0, -1.0, -0.5, 0.5, 2.0] {
        let p = Params::new(a, 0.0).unwrap();
        let t = solve_with(a, 0.0, 1.0, PI / 3.0, &tight);
        let m0 = first_integral_m(&p, &t.ic.initial_state()).unwrap().m();
        for st in t.samples.iter().filter(|s| s.theta.sin().abs() >= 1e-4 && s.x >= 1e-3) {
            let m = first_integral_m(&p, st).unwrap().m();
            assert!(((m - m0) / m0).abs() < 1e-6, "a = {a}, s = {}", st.s);
        }
    }
}

/// Height reached at `x = x_end` on the upper branch of the b = 0 catenoid
/// through the neck `(1, pi/2)`.
fn catenoid_height(a: f64, x_end: f64) -> f64 {
    let controls = IntegrationControls::default().with_tolerances(1e-12, 1e-14).with_max_arclength(1.5 * x_end);
    let t = solve_with(a, 0.0, 1.0, FRAC_PI_2, &controls);
    let s = t.radius_crossing(x_end, 0.0, 1.0).expect("branch reaches x_end");
    t.state_at(s).unwrap().z
}

#[test]
fn bounded_catenoid_height_matches_quadrature() {
    let m = first_integral_m(&Params::new(-2.0, 0.0).unwrap(), &wlw_core::ProfileState::new(0.0, 1.0, 0.0, FRAC_PI_2))
        .unwrap();
    let z1 = catenoid_asymptote(m, -2.0).unwrap().unwrap();
    assert!((z1 - 1.3110287771460599).abs() < 1e-12, "{z1}");
    let z_ode = catenoid_height(-2.0, 1e6);
    assert!((z_ode - z1).abs() < 1e-5, "ode {z_ode} vs quadrature {z1}");
}

#[test]
fn entire_catenoid_height_diverges() {
    let m = first_integral_m(&Params::new(-1.0, 0.0).unwrap(), &wlw_core::ProfileState::new(0.0, 1.0, 0.0, FRAC_PI_2))
        .unwrap();
    assert_eq!(catenoid_asymptote(m, -1.0).unwrap(), None);
    let z = catenoid_height(-1.0, 1e6);
    // z = arccosh(x) for the classical catenoid.
    assert!(z > 10.0);
    assert!((z - 1e6f64.acosh()).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reflection_covariance_random(a in prop_oneof![-3.0..-0.2f64, 0.2..3.0f64], b in -2.0..2.0f64,
                                    x0 in 0.3..4.0f64, th in 0.0..6.28f64) {
        prop_assume!(b.abs() > 1e-3);
        prop_assert!(reflection_residual(a, b, x0, th, 10.0) < 1e-8);
    }
}
