//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use wlw_core::check::first_integral_drift;
use wlw_core::classifier::{catenoid_asymptote, classification_controls, classify_surface, ClassificationReport, SurfaceClass};
use wlw_core::phase::{critical_points, eigenvalues, find_separatrix, linearize, vector_field, PointLabel};
use wlw_core::variational::{closure_integral_over, el_residual_power, exponent_map, EnergyParams, FnProfile, PowerEnergyParams};
use wlw_core::{
    check_horizontal_symmetry, detect_period, first_integral_m, integrate, EventKind, InitialConditions,
    IntegrationControls, Params, ProfileState,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn classify(a: f64, b: f64, x0: f64, th: f64) -> Result<ClassificationReport, String> {
    let p = Params::new(a, b).map_err(|e| e.to_string())?;
    let ic = InitialConditions::new(x0, th).map_err(|e| e.to_string())?;
    classify_surface(&p, &ic).map_err(|e| format!("({a}, {b}, {x0}): {e}"))
}

fn separatrix() -> Outcome {
    let t = Instant::now();
    let p = Params::new(3.0, 1.0).unwrap();
    let x = find_separatrix(&p, 0.0, (1.0, 10.0)).map_err(|e| e.to_string())?;
    let dt = t.elapsed().as_secs_f64();
    ensure((x - 5.196).abs() <= 0.05, format!("x = {x}"))?;
    ensure(dt < 30.0, format!("took {dt:.2} s"))?;
    Ok(format!("x = {x:.4} in {dt:.2} s"))
}

fn negative_a_sequence() -> Outcome {
    let t = Instant::now();
    let reports = [0.5, 2.0, 2.5, 3.0, 4.0]
        .iter()
        .map(|&x0| classify(-2.0, 1.0, x0, FRAC_PI_2))
        .collect::<Result<Vec<_>, _>>()?;
    let dt = t.elapsed().as_secs_f64();
    let classes: Vec<_> = reports.iter().map(|r| r.class).collect();
    use SurfaceClass::*;
    ensure(classes == [Unduloid, Cylinder, Unduloid, Sphere, Nodoid], format!("{classes:?}"))?;
    ensure(reports[1].radius == Some(2.0), format!("cylinder radius {:?}", reports[1].radius))?;
    let r = reports[3].radius.unwrap_or(f64::NAN);
    ensure((r - 3.0).abs() < 1e-5, format!("sphere radius {r}"))?;
    ensure(dt < 10.0, format!("took {dt:.2} s"))?;
    Ok(format!("{classes:?}, sphere radius {r:.8}, {dt:.2} s"))
}

fn positive_a_sequence() -> Outcome {
    let t = Instant::now();
    let reports = [1.0, 2.0, 3.0, 4.0]
        .iter()
        .map(|&x0| classify(3.0, 1.0, x0, 3.0 * FRAC_PI_2))
        .collect::<Result<Vec<_>, _>>()?;
    let dt = t.elapsed().as_secs_f64();
    let classes: Vec<_> = reports.iter().map(|r| r.class).collect();
    use SurfaceClass::*;
    ensure(classes == [Ovaloid, Ovaloid, Cylinder, Antinodoid], format!("{classes:?}"))?;
    ensure(reports[2].radius == Some(3.0), format!("cylinder radius {:?}", reports[2].radius))?;
    ensure(dt < 10.0, format!("took {dt:.2} s"))?;
    Ok(format!("{classes:?}, {dt:.2} s"))
}

fn matches_set(found: [Complex64; 2], want: [Complex64; 2], tol: f64) -> bool {
    let d = |p: Complex64, q: Complex64| (p - q).norm();
    (d(found[0], want[0]) < tol && d(found[1], want[1]) < tol) || (d(found[0], want[1]) < tol && d(found[1], want[0]) < tol)
}

fn eigenvalue_table() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20);
    let mut checked = 0;
    for _ in 0..20 {
        let a = loop {
            let a: f64 = rng.random_range(-4.0..4.0);
            if a.abs() > 0.05 {
                break a;
            }
        };
        let b = loop {
            let b: f64 = rng.random_range(-4.0..4.0);
            if b.abs() > 0.05 {
                break b;
            }
        };
        let p = Params::new(a, b).unwrap();
        let root = if a > 0.0 { Complex64::new(a.sqrt(), 0.0) } else { Complex64::new(0.0, (-a).sqrt()) };
        for c in critical_points(&p) {
            let want = match c.label {
                PointLabel::P1 => [Complex64::new(a, 0.0), Complex64::new(1.0, 0.0)],
                PointLabel::P2 => [Complex64::new(-a, 0.0), Complex64::new(-1.0, 0.0)],
                PointLabel::P3 | PointLabel::P4 => [root, -root],
            };
            // The field vanishes there, and the Jacobian agrees with finite differences.
            let (v0, v1) = vector_field(&p, c.theta, c.x);
            ensure(v0.abs() < 1e-12 && v1.abs() < 1e-12, format!("({a}, {b}) {:?} is not an equilibrium", c.label))?;
            let jac = linearize(&p, c.theta, c.x);
            let h = 1e-6;
            let fd = |dt: f64, dx: f64| {
                let (p1, q1) = vector_field(&p, c.theta + dt, c.x + dx);
                let (p0, q0) = vector_field(&p, c.theta - dt, c.x - dx);
                ((p1 - p0) / (2.0 * h), (q1 - q0) / (2.0 * h))
            };
            let (c0, c1) = (fd(h, 0.0), fd(0.0, h));
            let fd_jac = [[c0.0, c1.0], [c0.1, c1.1]];
            for i in 0..2 {
                for j in 0..2 {
                    ensure((jac[i][j] - fd_jac[i][j]).abs() < 1e-6, format!("({a}, {b}) {:?} Jacobian", c.label))?;
                }
            }
            let ev = eigenvalues(jac);
            ensure(matches_set(ev, want, 1e-12), format!("({a}, {b}) {:?}: {ev:?} vs {want:?}", c.label))?;
            ensure(matches_set(c.eigenvalues, want, 1e-12), format!("({a}, {b}) {:?} reported {:?}", c.label, c.eigenvalues))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} equilibria over 20 random (a, b)"))
}

fn euler_lagrange() -> Outcome {
    let cases = [
        (-2.0, 1.0, 0.5, FRAC_PI_2),
        (-2.0, 1.0, 4.0, FRAC_PI_2),
        (-1.0, 1.0, 0.7, FRAC_PI_2),
        (-1.0, 1.0, 1.5, FRAC_PI_2),
        (0.5, 1.0, 1.0, 0.0),
        (0.5, 1.0, 2.0, 3.0 * FRAC_PI_2),
        (2.0, 1.0, 1.0, 0.0),
        (2.0, 1.0, 3.0, 3.0 * FRAC_PI_2),
        (3.0, 1.0, 1.0, 0.0),
        (3.0, 1.0, 4.0, 3.0 * FRAC_PI_2),
    ];
    let (mut worst, mut weakest) = (0.0f64, f64::INFINITY);
    for (a, b, x0, th) in cases {
        let t = solve(a, b, x0, th, 40.0);
        let EnergyParams::Power(e) = exponent_map(&t.params).map_err(|e| e.to_string())? else {
            return Err(format!("({a}, {b}) maps to the exponential energy"));
        };
        let r = el_residual_power(&t, &e).map_err(|err| format!("({a}, {b}, {x0}): {err}"))?.max_relative();
        ensure(r < 1e-6, format!("({a}, {b}, {x0}): residual {r:e}"))?;
        let off = PowerEnergyParams::new(e.p() + 0.1, e.mu()).unwrap();
        let r_off = el_residual_power(&t, &off).map_err(|err| err.to_string())?.max_relative();
        ensure(r_off > 1e-2, format!("({a}, {b}, {x0}): perturbed residual {r_off:e}"))?;
        worst = worst.max(r);
        weakest = weakest.min(r_off);
    }
    Ok(format!("max matched {worst:.1e}, min perturbed {weakest:.1e} over 10 trajectories"))
}

fn first_integral() -> Outcome {
    let controls = IntegrationControls::default().with_tolerances(1e-12, 1e-13).with_max_arclength(100.0);
    let mut worst = 0.0f64;
    for a in [-2.0, -1.0, -0.5, 0.5, 2.0] {
        let t = solve_with(a, 0.0, 1.0, PI / 3.0, &controls);
        let d = first_integral_drift(&t).map_err(|e| e.to_string())?;
        ensure(d < 1e-6, format!("a = {a}: drift {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("max relative drift {worst:.1e}"))
}

fn symmetry_and_period() -> Outcome {
    let mut cases: Vec<(f64, f64, f64, f64)> = COVARIANCE_CASES.to_vec();
    cases.extend([0.5, 2.5, 4.0].map(|x0| (-2.0, 1.0, x0, FRAC_PI_2)));
    cases.extend([1.0, 4.0].map(|x0| (3.0, 1.0, x0, 3.0 * FRAC_PI_2)));
    cases.extend([1.0, 2.0, 6.0].map(|x0| (3.0, 1.0, x0, 0.0)));
    cases.extend([(2.0, 0.0, 1.0, FRAC_PI_2), (-2.0, -1.0, 4.0, 3.0 * FRAC_PI_2)]);
    let (mut tangents, mut periodic, mut worst_sym, mut worst_per) = (0, 0, 0.0f64, 0.0f64);
    for (a, b, x0, th) in cases {
        let p = Params::new(a, b).unwrap();
        let ic = InitialConditions::new(x0, th).unwrap();
        let t = integrate(&p, &ic, &classification_controls(&p, &ic)).map_err(|e| e.to_string())?;
        for e in t.events_of(EventKind::VerticalTangent) {
            let r = check_horizontal_symmetry(&t, e.s).map_err(|err| format!("({a}, {b}, {x0}) s = {}: {err}", e.s))?;
            ensure(r < 1e-6, format!("({a}, {b}, {x0}) s = {}: symmetry residual {r:e}", e.s))?;
            worst_sym = worst_sym.max(r);
            tangents += 1;
        }
        if t.has_full_turn() {
            let per = detect_period(&t).map_err(|err| format!("({a}, {b}, {x0}): {err}"))?;
            worst_per = worst_per.max(per.residual);
            periodic += 1;
        }
    }
    ensure(periodic > 0 && tangents > 0, "suite exercised nothing")?;
    Ok(format!(
        "{tangents} vertical tangents (max {worst_sym:.1e}), {periodic} full-turn trajectories (max {worst_per:.1e})"
    ))
}

fn covariances() -> Outcome {
    let (mut refl, mut homo) = (0.0f64, 0.0f64);
    for (a, b, x0, th) in COVARIANCE_CASES {
        let r = reflection_residual(a, b, x0, th, 40.0);
        ensure(r < 1e-8, format!("({a}, {b}, {x0}) reflection {r:e}"))?;
        refl = refl.max(r);
        for lambda in [0.5, 3.0] {
            let h = homothety_residual(a, b, x0, th, lambda, 40.0);
            ensure(h < 1e-8, format!("({a}, {b}, {x0}) x {lambda}: homothety {h:e}"))?;
            homo = homo.max(h);
        }
    }
    Ok(format!("reflection {refl:.1e}, homothety {homo:.1e}"))
}

fn closure_obstruction() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    let strategy = (
        0.05f64..3.0,
        0.0f64..0.95,
        0.5f64..10.0,
        1u32..4,
        prop::sample::select(vec![-2.5, -1.0, -0.5, 0.3, 0.5, 1.5, 2.0, 3.0, 4.5]),
    );
    let smallest = std::cell::Cell::new(f64::INFINITY);
    runner
        .run(&strategy, |(c, frac, period, harmonic, p)| {
            let eps = frac * c;
            let w = TAU * harmonic as f64 / period;
            let prof = FnProfile { f: move |s: f64| c + eps * (w * s).sin(), lo: 0.0, hi: period };
            let e = PowerEnergyParams::new(p, 0.0).unwrap();
            let v = closure_integral_over(&prof, &e, (0.0, period)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            smallest.set(smallest.get().min(v));
            prop_assert!(v > 1e-8, "integral {}", v);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("256 random periodic profiles, smallest integral {:.2e}", smallest.get()))
}

fn reconstruction() -> Outcome {
    let mut worst = 0.0f64;
    for (a, b, x0, th, lo, hi) in [
        (3.0, 1.0, 1.0, 0.0, -0.5, 0.5),
        (-2.0, 1.0, 0.5, FRAC_PI_2, -10.0, 10.0),
        (-2.0, 1.0, 4.0, FRAC_PI_2, -10.0, 10.0),
        (2.0, 1.0, 3.0, 3.0 * FRAC_PI_2, -10.0, 10.0),
        (0.5, 1.0, 2.0, 3.0 * FRAC_PI_2, -3.0, 3.0),
        (1.0, 1.0, 2.0, 0.0, -1.0, 1.0),
    ] {
        let t = solve(a, b, x0, th, 40.0);
        let r = reconstruction_residual(&t, lo, hi);
        ensure(r < 1e-5, format!("({a}, {b}, {x0}): {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("6 cases, max aligned distance {worst:.1e}"))
}

fn catenoid_height(a: f64, x_end: f64) -> Result<f64, String> {
    let controls = IntegrationControls::default().with_tolerances(1e-12, 1e-14).with_max_arclength(1.5 * x_end);
    let t = solve_with(a, 0.0, 1.0, FRAC_PI_2, &controls);
    let s = t.radius_crossing(x_end, 0.0, 1.0).ok_or("branch does not reach x = 1e6")?;
    Ok(t.state_at(s).ok_or("no state")?.z)
}

fn catenoid() -> Outcome {
    let neck = ProfileState::new(0.0, 1.0, 0.0, FRAC_PI_2);
    let m = first_integral_m(&Params::new(-2.0, 0.0).unwrap(), &neck).unwrap();
    let z1 = catenoid_asymptote(m, -2.0).map_err(|e| e.to_string())?.ok_or("no asymptote for a = -2")?;
    let z_ode = catenoid_height(-2.0, 1e6)?;
    ensure((z1 - z_ode).abs() < 1e-5, format!("quadrature {z1} vs ODE {z_ode}"))?;
    let m = first_integral_m(&Params::new(-1.0, 0.0).unwrap(), &neck).unwrap();
    ensure(catenoid_asymptote(m, -1.0).map_err(|e| e.to_string())?.is_none(), "a = -1 reported bounded")?;
    let z = catenoid_height(-1.0, 1e6)?;
    ensure(z > 10.0, format!("a = -1: z(1e6) = {z}"))?;
    Ok(format!("a = -2: {z1:.10} vs {z_ode:.10}; a = -1: z(1e6) = {z:.4}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("separatrix reproduction", separatrix),
        ("negative-a figure sequence", negative_a_sequence),
        ("positive-a vertical-start sequence", positive_a_sequence),
        ("eigenvalue table", eigenvalue_table),
        ("Euler-Lagrange residual", euler_lagrange),
        ("first integral", first_integral),
        ("symmetry and periodicity", symmetry_and_period),
        ("covariances", covariances),
        ("closed-curve obstruction", closure_obstruction),
        ("reconstruction", reconstruction),
        ("catenoid asymptote", catenoid),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
