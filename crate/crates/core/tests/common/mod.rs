#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use wlw_core::variational::{
    critical_curve_exp, critical_curve_power, critical_curve_scale, exponent_map, CriticalCurveScale, EnergyParams,
    FnProfile,
};
use wlw_core::{integrate, InitialConditions, IntegrationControls, Params, Trajectory};

pub fn solve_with(a: f64, b: f64, x0: f64, th0: f64, controls: &IntegrationControls) -> Trajectory {
    integrate(&Params::new(a, b).unwrap(), &InitialConditions::new(x0, th0).unwrap(), controls)
        .unwrap_or_else(|e| panic!("({a}, {b}, {x0}, {th0}): {e}"))
}

pub fn solve(a: f64, b: f64, x0: f64, th0: f64, length: f64) -> Trajectory {
    solve_with(a, b, x0, th0, &IntegrationControls::default().with_max_arclength(length))
}

/// Tolerances used where two independently integrated solutions are compared
/// pointwise at the 1e-8 level.
pub fn tight(length: f64) -> IntegrationControls {
    IntegrationControls::default().with_tolerances(1e-12, 1e-14).with_max_arclength(length)
}

/// Cases used for the symmetry-covariance checks.
pub const COVARIANCE_CASES: [(f64, f64, f64, f64); 5] = [
    (-2.0, 1.0, 2.5, FRAC_PI_2),
    (-2.0, 1.0, 4.0, FRAC_PI_2),
    (3.0, 1.0, 1.0, 0.0),
    (3.0, 1.0, 4.0, 3.0 * FRAC_PI_2),
    (0.5, 1.0, 1.0, PI / 3.0),
];

const PROBES: usize = 200;

/// Largest mismatch between `traj` and the reflected solution, which must
/// satisfy `x'(s) = x(-s)`, `z'(s) = z(-s)`, `theta'(s) = theta(-s) + pi`.
pub fn reflection_residual(a: f64, b: f64, x0: f64, th0: f64, length: f64) -> f64 {
    let t = solve_with(a, b, x0, th0, &tight(length));
    let r = solve_with(a, -b, x0, th0 + PI, &tight(length));
    let lo = t.s_min().max(-r.s_max());
    let hi = t.s_max().min(-r.s_min());
    let mut worst: f64 = 0.0;
    for k in 0..=PROBES {
        let s = (lo + (hi - lo) * k as f64 / PROBES as f64).clamp(lo, hi);
        let (p, q) = (t.state_at(s).unwrap(), r.state_at((-s).clamp(r.s_min(), r.s_max())).unwrap());
        worst = worst
            .max((p.x - q.x).abs())
            .max((p.z - q.z).abs())
            .max(((q.theta - p.theta).rem_euclid(2.0 * PI) - PI).abs());
    }
    worst
}

/// Largest relative mismatch between `traj` and the solution rescaled by
/// `lambda`, which must satisfy `x'(s) = lambda x(s / lambda)` and likewise
/// for `z`, with `theta'(s) = theta(s / lambda)`.
pub fn homothety_residual(a: f64, b: f64, x0: f64, th0: f64, lambda: f64, length: f64) -> f64 {
    let t = solve_with(a, b, x0, th0, &tight(length));
    let r = solve_with(a, b / lambda, lambda * x0, th0, &tight(lambda * length));
    let lo = t.s_min().max(r.s_min() / lambda);
    let hi = t.s_max().min(r.s_max() / lambda);
    let mut worst: f64 = 0.0;
    for k in 0..=PROBES {
        let s = (lo + (hi - lo) * k as f64 / PROBES as f64).clamp(lo, hi);
        let (p, q) = (t.state_at(s).unwrap(), r.state_at((lambda * s).clamp(r.s_min(), r.s_max())).unwrap());
        worst = worst
            .max((q.x / lambda - p.x).abs())
            .max((q.z / lambda - p.z).abs())
            .max((q.theta - p.theta).abs());
    }
    worst
}

/// Least-squares rigid motion (rotation and translation, no reflection)
/// taking `src` onto `dst`; returns the max pointwise distance after alignment.
fn rigid_residual(src: &[(f64, f64)], dst: &[(f64, f64)]) -> f64 {
    let n = src.len() as f64;
    let cs = src.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let cd = dst.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (p, q) in src.iter().zip(dst) {
        let (px, py) = (p.0 - cs.0, p.1 - cs.1);
        let (qx, qy) = (q.0 - cd.0, q.1 - cd.1);
        sxx += px * qx + py * qy;
        sxy += px * qy - py * qx;
    }
    let phi = sxy.atan2(sxx);
    let (s, c) = phi.sin_cos();
    src.iter()
        .zip(dst)
        .map(|(p, q)| {
            let (px, py) = (p.0 - cs.0, p.1 - cs.1);
            let (rx, ry) = (c * px - s * py + cd.0, s * px + c * py + cd.1);
            ((rx - q.0).powi(2) + (ry - q.1).powi(2)).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Rebuilds the critical curve from `theta'` of `t` on `[lo, hi]` and returns
/// the rigid-alignment residual against the source profile.
pub fn reconstruction_residual(t: &Trajectory, lo: f64, hi: f64) -> f64 {
    let ep = exponent_map(&t.params).unwrap();
    let d = critical_curve_scale(&t.params, t.ic.x0(), t.ic.theta0(), &ep).abs();
    let d = CriticalCurveScale::new(d).unwrap();
    let prof = FnProfile { f: |s: f64| t.theta_prime_at(s).unwrap(), lo, hi };
    let pts = match ep {
        EnergyParams::Power(e) => critical_curve_power(&prof, &e, d, 200),
        EnergyParams::Exp(e) => critical_curve_exp(&prof, &e, d, 200),
    }
    .unwrap();
    let src: Vec<(f64, f64)> = pts.iter().map(|p| (p.x, p.z)).collect();
    let dst: Vec<(f64, f64)> = pts
        .iter()
        .map(|p| {
            let s = t.state_at(p.s).unwrap();
            (s.x, s.z)
        })
        .collect();
    rigid_residual(&src, &dst)
}
