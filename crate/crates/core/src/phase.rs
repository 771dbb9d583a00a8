//! The autonomous `(theta, x)` system `theta' = a sin(theta) + b x`,
//! `x' = x cos(theta)`: equilibria, linearization, separatrix shooting and
//! portrait sampling.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate_branch, IntegrationControls, Termination};
use crate::model::{InitialConditions, Params};
use crate::ode::{OdeSystem, StepOutcome, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingularityKind {
    UnstableNode,
    ImproperNode,
    StableNode,
    Saddle,
    ImproperSaddle,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointLabel {
    P1,
    P2,
    P3,
    P4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub label: PointLabel,
    pub theta: f64,
    pub x: f64,
    #[serde(with = "complex_pair")]
    pub eigenvalues: [Complex64; 2],
    pub kind: SingularityKind,
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
        [[v[0].re, v[0].im], [v[1].re, v[1].im]].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
        let p = <[[f64; 2]; 2]>::deserialize(d)?;
        Ok([Complex64::new(p[0][0], p[0][1]), Complex64::new(p[1][0], p[1][1])])
    }
}

/// The phase-plane vector field `V(theta, x)`.
pub fn vector_field(params: &Params, theta: f64, x: f64) -> (f64, f64) {
    let (sin, cos) = theta.sin_cos();
    (params.a() * sin + params.b() * x, x * cos)
}

/// Jacobian of `V` at `(theta, x)`.
pub fn linearize(params: &Params, theta: f64, x: f64) -> [[f64; 2]; 2] {
    let (sin, cos) = theta.sin_cos();
    [[params.a() * cos, params.b()], [-x * sin, cos]]
}

/// Eigenvalues of a real 2x2 matrix, ordered with the larger real part first.
pub fn eigenvalues(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = Complex64::new(0.25 * tr * tr - det, 0.0).sqrt();
    let half = Complex64::new(0.5 * tr, 0.0);
    // Avoid cancellation for real roots of very different size.
    if disc.im == 0.0 && tr != 0.0 {
        let big = half + disc * tr.signum();
        let small = if big.norm() > 0.0 { Complex64::new(det, 0.0) / big } else { big };
        let (p, q) = if big.re >= small.re { (big, small) } else { (small, big) };
        return [p, q];
    }
    [half + disc, half - disc]
}

/// Classifies an equilibrium from its eigenvalues.
pub fn classify_singularity(ev: [Complex64; 2]) -> Result<SingularityKind> {
    const TOL: f64 = 1e-12;
    if ev.iter().any(|z| z.norm() <= TOL) {
        return Err(Error::Degenerate);
    }
    let real = ev.iter().all(|z| z.im.abs() <= TOL * z.norm());
    if real {
        let (p, q) = (ev[0].re, ev[1].re);
        return Ok(if p > 0.0 && q > 0.0 {
            if (p - q).abs() <= TOL * p.abs().max(q.abs()) {
                SingularityKind::ImproperNode
            } else {
                SingularityKind::UnstableNode
            }
        } else if p < 0.0 && q < 0.0 {
            SingularityKind::StableNode
        } else {
            SingularityKind::Saddle
        });
    }
    if ev.iter().all(|z| z.re.abs() <= TOL * z.norm()) {
        return Ok(SingularityKind::Center);
    }
    Err(Error::Unsupported("spiral equilibria do not occur for this field".into()))
}

/// Equilibria with `x >= 0`: `P1`, `P2` always, `P3 = (pi/2, -a/b)` when
/// `-a/b > 0` and `P4 = (3 pi/2, a/b)` when `a/b > 0`.
pub fn critical_points(params: &Params) -> Vec<CriticalPoint> {
    let (a, b) = (params.a(), params.b());
    let mut pts = vec![(PointLabel::P1, 0.0, 0.0), (PointLabel::P2, PI, 0.0)];
    if b != 0.0 {
        if -a / b > 0.0 {
            pts.push((PointLabel::P3, FRAC_PI_2, -a / b));
        }
        if a / b > 0.0 {
            pts.push((PointLabel::P4, 3.0 * FRAC_PI_2, a / b));
        }
    }
    pts.into_iter()
        .map(|(label, theta, x)| {
            let ev = analytic_eigenvalues(label, a, b);
            let mut kind = classify_singularity(ev).expect("a != 0 keeps eigenvalues non-zero");
            // With a = -1 the saddle at P2 has eigenvalues of equal size.
            if label == PointLabel::P2 && kind == SingularityKind::Saddle && a == -1.0 {
                kind = SingularityKind::ImproperSaddle;
            }
            CriticalPoint { label, theta, x, eigenvalues: ev, kind }
        })
        .collect()
}

/// Eigenvalues at the labelled equilibria, exact in floating point.
fn analytic_eigenvalues(label: PointLabel, a: f64, b: f64) -> [Complex64; 2] {
    let r = |v: f64| Complex64::new(v, 0.0);
    match label {
        PointLabel::P1 => [r(a), r(1.0)],
        PointLabel::P2 => [r(-a), r(-1.0)],
        PointLabel::P3 | PointLabel::P4 => {
            let _ = b;
            if a > 0.0 {
                [r(a.sqrt()), r(-a.sqrt())]
            } else {
                [Complex64::new(0.0, (-a).sqrt()), Complex64::new(0.0, -(-a).sqrt())]
            }
        }
    }
}

/// Whether the forward profile branch from `x0` completes a full turn of
/// the tangent within the classification budget.
pub fn forward_turns(params: &Params, theta0: f64, x0: f64) -> Result<bool> {
    let ic = InitialConditions::new(x0, theta0)?;
    let scale = params.length_scale(x0);
    let controls = IntegrationControls::default().with_max_arclength(200.0 * scale);
    let stop = |st: &crate::model::ProfileState| (st.theta - theta0).abs() >= TAU;
    let res = integrate_branch(params, &ic, &controls, 1.0, Some(&stop));
    let last = res.samples.last().expect("at least the initial state");
    Ok(res.termination != Termination::AxisReached && (last.theta - theta0).abs() >= TAU)
}

/// Bisects on `x0` between a bracket whose endpoints differ in whether the
/// forward branch turns fully, until the bracket is narrower than
/// `1e-6 * x_bar` or 60 halvings have been made.
pub fn find_separatrix(params: &Params, theta0: f64, bracket: (f64, f64)) -> Result<f64> {
    if !(params.a() > 0.0 && params.b() > 0.0) {
        return Err(Error::InvalidParams("separatrix shooting needs a > 0 and b > 0".into()));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParams(format!("bad bracket ({lo}, {hi})")));
    }
    let f_lo = forward_turns(params, theta0, lo)?;
    let f_hi = forward_turns(params, theta0, hi)?;
    if f_lo == f_hi {
        let what = if f_lo { "both turn fully" } else { "neither turns fully" };
        return Err(Error::NoBracket(what.into()));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-6 * mid {
            break;
        }
        if forward_turns(params, theta0, mid)? == f_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grid bounds and orbit seeds for [`phase_portrait`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub theta_min: f64,
    pub theta_max: f64,
    pub x_max: f64,
    pub n_theta: usize,
    pub n_x: usize,
    pub seeds: Vec<(f64, f64)>,
    /// Time span of each orbit in each direction.
    pub orbit_time: f64,
}

impl GridSpec {
    /// A default window over `[0, 2 pi] x [0, x_max]` with orbits seeded
    /// along `theta = pi/2` and `theta = 3 pi/2`.
    pub fn standard(params: &Params) -> Self {
        let scale = params.length_scale(1.0);
        let x_max = 2.5 * scale;
        let mut seeds = Vec::new();
        for k in 1..=8 {
            let x = x_max * k as f64 / 9.0;
            seeds.push((FRAC_PI_2, x));
            seeds.push((3.0 * FRAC_PI_2, x));
        }
        Self {
            theta_min: 0.0,
            theta_max: TAU,
            x_max,
            n_theta: 25,
            n_x: 15,
            seeds,
            orbit_time: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub theta: f64,
    pub x: f64,
    pub dtheta: f64,
    pub dx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePortrait {
    pub grid: Vec<FieldSample>,
    /// Orbits as `(theta, x)` points ordered along the flow.
    pub orbits: Vec<Vec<(f64, f64)>>,
}

struct PhaseField {
    a: f64,
    b: f64,
}

impl OdeSystem<2> for PhaseField {
    fn derivative(&self, y: &[f64; 2]) -> [f64; 2] {
        let (sin, cos) = y[0].sin_cos();
        [self.a * sin + self.b * y[1], y[1] * cos]
    }

    fn admissible(&self, y: &[f64; 2]) -> bool {
        y[1] >= 0.0
    }

    fn error_scale(&self, i: usize, y0: &[f64; 2], y1: &[f64; 2], rtol: f64, atol: f64) -> f64 {
        match i {
            0 => atol + rtol,
            _ => atol + rtol * y0[1].abs().max(y1[1].abs()),
        }
    }
}

/// Integrates the phase field from `seed` for time `t_span` in direction
/// `dir`, stopping early when `x` leaves `[x_floor, x_ceiling]`.
pub fn integrate_orbit(
    params: &Params,
    seed: (f64, f64),
    t_span: f64,
    dir: f64,
    bounds: (f64, f64),
) -> Vec<(f64, f64)> {
    let field = PhaseField { a: params.a(), b: params.b() };
    let mut st = Stepper::new(&field, 0.0, [seed.0, seed.1], dir, 1e-10, 1e-12, t_span / 64.0);
    let mut out = vec![seed];
    while st.s.abs() < t_span && st.steps < 200_000 {
        st.clamp_next(t_span - st.s.abs());
        match st.step() {
            StepOutcome::Accepted(seg) => {
                for k in 1..=4 {
                    let y = seg.eval(seg.s_start + seg.h * k as f64 / 4.0);
                    out.push((y[0], y[1]));
                }
            }
            StepOutcome::Failed => break,
        }
        if st.y[1] < bounds.0 || st.y[1] > bounds.1 {
            break;
        }
    }
    out
}

/// Samples `V` on a grid and integrates orbits through every seed in both
/// time directions.
pub fn phase_portrait(params: &Params, spec: &GridSpec) -> Result<PhasePortrait> {
    if !(spec.x_max > 0.0) || spec.n_theta < 2 || spec.n_x < 2 || !(spec.theta_max > spec.theta_min) {
        return Err(Error::InvalidParams("empty phase-portrait grid".into()));
    }
    let mut grid = Vec::with_capacity(spec.n_theta * spec.n_x);
    for j in 0..spec.n_x {
        let x = spec.x_max * j as f64 / (spec.n_x - 1) as f64;
        for i in 0..spec.n_theta {
            let theta = spec.theta_min
                + (spec.theta_max - spec.theta_min) * i as f64 / (spec.n_theta - 1) as f64;
            let (dtheta, dx) = vector_field(params, theta, x);
            grid.push(FieldSample { theta, x, dtheta, dx });
        }
    }
    let bounds = (1e-9, 4.0 * spec.x_max);
    let orbits = spec
        .seeds
        .iter()
        .map(|&seed| {
            let mut back = integrate_orbit(params, seed, spec.orbit_time, -1.0, bounds);
            back.reverse();
            back.pop();
            back.extend(integrate_orbit(params, seed, spec.orbit_time, 1.0, bounds));
            back
        })
        .collect();
    Ok(PhasePortrait { grid, orbits })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    #[test]
    fn saddle_for_positive_a() {
        let pts = critical_points(&p(2.0, 1.0));
        assert_eq!(pts.len(), 3);
        let p4 = pts.iter().find(|c| c.label == PointLabel::P4).unwrap();
        assert_eq!((p4.theta, p4.x), (3.0 * FRAC_PI_2, 2.0));
        assert_eq!(p4.kind, SingularityKind::Saddle);
        assert_eq!(pts[0].kind, SingularityKind::UnstableNode);
        assert_eq!(pts[1].kind, SingularityKind::StableNode);
    }

    #[test]
    fn center_for_negative_a() {
        let pts = critical_points(&p(-2.0, 1.0));
        let p3 = pts.iter().find(|c| c.label == PointLabel::P3).unwrap();
        assert_eq!((p3.theta, p3.x), (FRAC_PI_2, 2.0));
        assert_eq!(p3.kind, SingularityKind::Center);
        assert!(pts.iter().all(|c| c.label != PointLabel::P4));
    }

    #[test]
    fn improper_cases() {
        assert_eq!(critical_points(&p(1.0, 1.0))[0].kind, SingularityKind::ImproperNode);
        assert_eq!(critical_points(&p(-1.0, 1.0))[1].kind, SingularityKind::ImproperSaddle);
        assert_eq!(critical_points(&p(-3.0, 1.0))[1].kind, SingularityKind::Saddle);
    }

    #[test]
    fn critical_points_are_zeros_of_the_field() {
        for (a, b) in [(2.0, 1.0), (-2.0, 1.0), (0.5, -3.0), (-0.7, -0.2)] {
            let pr = p(a, b);
            for c in critical_points(&pr) {
                let (u, v) = vector_field(&pr, c.theta, c.x);
                assert!(u.abs() < 1e-14 && v.abs() < 1e-14, "{c:?}");
            }
        }
    }

    #[test]
    fn numeric_eigenvalues_match_analytic() {
        for (a, b) in [(2.0, 1.0), (-2.0, 1.0), (3.0, -0.5)] {
            let pr = p(a, b);
            for c in critical_points(&pr) {
                let ev = eigenvalues(linearize(&pr, c.theta, c.x));
                for k in 0..2 {
                    assert!(
                        ev.iter().any(|e| (e - c.eigenvalues[k]).norm() < 1e-12),
                        "{ev:?} vs {:?}",
                        c.eigenvalues
                    );
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let r = |v: f64| Complex64::new(v, 0.0);
        let s3 = 3f64.sqrt();
        let s2 = 2f64.sqrt();
        assert_eq!(classify_singularity([r(2.0), r(1.0)]).unwrap(), SingularityKind::UnstableNode);
        assert_eq!(classify_singularity([r(s3), r(-s3)]).unwrap(), SingularityKind::Saddle);
        assert_eq!(
            classify_singularity([Complex64::new(0.0, s2), Complex64::new(0.0, -s2)]).unwrap(),
            SingularityKind::Center
        );
        assert_eq!(classify_singularity([r(0.0), r(1.0)]), Err(Error::Degenerate));
    }

    #[test]
    fn boundary_field_is_tangent() {
        let pr = p(2.0, 1.0);
        for k in 0..10 {
            let (_, dx) = vector_field(&pr, k as f64 * 0.7, 0.0);
            assert_eq!(dx, 0.0);
        }
    }

    #[test]
    fn orbits_close_around_center() {
        let pr = p(-2.0, 1.0);
        let seed = (FRAC_PI_2, 2.3);
        let orbit = integrate_orbit(&pr, seed, 30.0, 1.0, (1e-9, 10.0));
        // Return to theta = pi/2 going upward.
        let mut returns = orbit
            .windows(2)
            .skip(8)
            .filter(|w| w[0].0 < FRAC_PI_2 && w[1].0 >= FRAC_PI_2);
        assert!(returns.next().is_some());
    }

    #[test]
    fn portrait_has_grid_and_orbits() {
        let pr = p(2.0, 1.0);
        let spec = GridSpec::standard(&pr);
        let pp = phase_portrait(&pr, &spec).unwrap();
        assert_eq!(pp.grid.len(), spec.n_theta * spec.n_x);
        assert_eq!(pp.orbits.len(), spec.seeds.len());
        assert!(pp.orbits.iter().all(|o| o.iter().all(|&(_, x)| x >= 0.0)));
    }
}
