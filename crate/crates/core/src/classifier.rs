//! Surface taxonomy for `kappa1 = a kappa2 + b` profiles.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::integrator::{detect_period, integrate, EventKind, IntegrationControls, Termination, Trajectory};
use crate::model::{first_integral_m, reflect_b, FirstIntegralValue, InitialConditions, Params};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceClass {
    Plane,
    Sphere,
    Cylinder,
    Ovaloid,
    CatenoidEntire,
    CatenoidBounded,
    Vesicle,
    PinchedSpheroid,
    ImmersedSpheroid,
    CylindricalAntinodoid,
    Antinodoid,
    Unduloid,
    Nodoid,
}

impl SurfaceClass {
    pub fn name(self) -> &'static str {
        match self {
            Self::Plane => "Plane",
            Self::Sphere => "Sphere",
            Self::Cylinder => "Cylinder",
            Self::Ovaloid => "Ovaloid",
            Self::CatenoidEntire => "CatenoidEntire",
            Self::CatenoidBounded => "CatenoidBounded",
            Self::Vesicle => "Vesicle",
            Self::PinchedSpheroid => "PinchedSpheroid",
            Self::ImmersedSpheroid => "ImmersedSpheroid",
            Self::CylindricalAntinodoid => "CylindricalAntinodoid",
            Self::Antinodoid => "Antinodoid",
            Self::Unduloid => "Unduloid",
            Self::Nodoid => "Nodoid",
        }
    }

    /// Classes whose profile is periodic in `z`.
    pub fn is_periodic(self) -> bool {
        matches!(self, Self::Unduloid | Self::Nodoid | Self::Antinodoid)
    }
}

impl std::fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Isoparametric solutions available for a parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpecialSolution {
    Plane,
    /// A round sphere; `None` when every radius occurs (`a = 1`, `b = 0`).
    Sphere(Option<f64>),
    Cylinder(f64),
}

/// Range of the unwrapped tangent angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaRange {
    Bounded(f64, f64),
    Unbounded,
}

impl Serialize for ThetaRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Bounded(lo, hi) => [lo, hi].serialize(s),
            Self::Unbounded => s.serialize_str("Unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for ThetaRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair([f64; 2]),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Pair([lo, hi]) => Ok(Self::Bounded(lo, hi)),
            Raw::Tag(t) if t == "Unbounded" => Ok(Self::Unbounded),
            Raw::Tag(t) => Err(serde::de::Error::custom(format!("unknown theta range {t}"))),
        }
    }
}

/// Classification with measured features. Field names are stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub class: SurfaceClass,
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub theta0: f64,
    /// Radius of a sphere or cylinder, or of an ovaloid that is a round sphere.
    pub radius: Option<f64>,
    /// `(z(s1), z(s2))` for the backward and forward axis hits.
    pub pole_z: Option<[f64; 2]>,
    pub period: Option<f64>,
    pub z_shift: Option<f64>,
    pub self_intersections: usize,
    pub asymptotic_radius: Option<f64>,
    /// Limit height of a bounded catenoid-type branch above its neck.
    pub z_asymptote: Option<f64>,
    pub theta_range: ThetaRange,
    /// True when `b < 0` was mapped to `b > 0` before classification.
    pub canonicalized_b: bool,
}

/// Lists the isoparametric solutions of `(a, b)`.
pub fn special_solutions(params: &Params) -> Vec<SpecialSolution> {
    let (a, b) = (params.a(), params.b());
    let mut out = Vec::new();
    if b == 0.0 {
        out.push(SpecialSolution::Plane);
        if a == 1.0 {
            out.push(SpecialSolution::Sphere(None));
        }
    } else {
        if a != 1.0 {
            out.push(SpecialSolution::Sphere(Some((1.0 - a).abs() / b.abs())));
        }
        out.push(SpecialSolution::Cylinder((a / b).abs()));
    }
    out
}

/// `(x_cyl, x_sph) = (-a/b, (1-a)/b)` for `a < 0`, `b > 0`.
pub fn nodoid_threshold(params: &Params) -> Result<(f64, f64)> {
    let (a, b) = (params.a(), params.b());
    if a >= 0.0 {
        return Err(Error::WrongSignRegime(a));
    }
    if !(b > 0.0) {
        return Err(Error::InvalidParams(format!("nodoid thresholds need b > 0, got {b}")));
    }
    Ok((-a / b, (1.0 - a) / b))
}

/// Height `z1` approached by a catenoid-type branch with first integral `m`
/// as `x -> infinity`, measured from its neck. `None` when the height
/// diverges (`-1 <= a < 0`).
pub fn catenoid_asymptote(m: FirstIntegralValue, a: f64) -> Result<Option<f64>> {
    if a >= 0.0 {
        return Err(Error::WrongSignRegime(a));
    }
    if a >= -1.0 {
        return Ok(None);
    }
    let q = -2.0 * a;
    let x_min = (-m.m()).powf(1.0 / q);
    Ok(Some(x_min * unit_neck_integral(q)?))
}

/// `I(q) = int_1^inf du / sqrt(u^q - 1)` for `q > 2`.
fn unit_neck_integral(q: f64) -> Result<f64> {
    // Near u = 1: u = 1 + v^2 removes the inverse square root.
    let head = quadrature::integrate(
        |v: f64| {
            let d = (q * (v * v).ln_1p()).exp_m1();
            if v == 0.0 {
                2.0 / q.sqrt()
            } else {
                2.0 * v / d.sqrt()
            }
        },
        0.0,
        1.0,
        1e-13,
        1e-13,
    )?;
    // Tail u in [2, inf): u = 1/y, then y = w^(1/(e+1)) with e = q/2 - 2.
    let e1 = q / 2.0 - 1.0;
    let tail = quadrature::integrate(
        |w: f64| {
            let y = w.powf(1.0 / e1);
            1.0 / (e1 * (1.0 - y.powf(q)).sqrt())
        },
        0.0,
        0.5f64.powf(e1),
        1e-13,
        1e-13,
    )?;
    Ok(head.value + tail.value)
}

/// Controls used by [`classify_surface`]: defaults with an arclength budget
/// of `200 max(x0, |a/b|)` per branch.
pub fn classification_controls(params: &Params, ic: &InitialConditions) -> IntegrationControls {
    IntegrationControls::default().with_max_arclength(200.0 * params.length_scale(ic.x0()))
}

pub fn classify_surface(params: &Params, ic: &InitialConditions) -> Result<ClassificationReport> {
    classify_surface_with(params, ic, &classification_controls(params, ic))
}

/// Classifies the surface generated by `(params, ic)`.
pub fn classify_surface_with(
    params: &Params,
    ic: &InitialConditions,
    controls: &IntegrationControls,
) -> Result<ClassificationReport> {
    controls.validate()?;
    let reflected = params.b() < 0.0;
    let (p, c) = if reflected { reflect_b(params, ic) } else { (*params, *ic) };
    let mut report = classify_canonical(&p, &c, controls)?;
    report.a = params.a();
    report.b = params.b();
    report.x0 = ic.x0();
    report.theta0 = ic.theta0();
    report.canonicalized_b = reflected;
    if reflected {
        // x(s) and z(s) of the reflected problem are those of the original at -s.
        report.pole_z = report.pole_z.map(|[z1, z2]| [z2, z1]);
        report.z_shift = report.z_shift.map(|z| -z);
        if let ThetaRange::Bounded(lo, hi) = report.theta_range {
            report.theta_range = ThetaRange::Bounded(lo - PI, hi - PI);
        }
    }
    Ok(report)
}

fn base_report(class: SurfaceClass, params: &Params, ic: &InitialConditions) -> ClassificationReport {
    ClassificationReport {
        class,
        a: params.a(),
        b: params.b(),
        x0: ic.x0(),
        theta0: ic.theta0(),
        radius: None,
        pole_z: None,
        period: None,
        z_shift: None,
        self_intersections: 0,
        asymptotic_radius: None,
        z_asymptote: None,
        theta_range: ThetaRange::Bounded(ic.theta0(), ic.theta0()),
        canonicalized_b: false,
    }
}

fn close(u: f64, v: f64, scale: f64) -> bool {
    (u - v).abs() <= 1e-12 * scale
}

fn classify_canonical(
    params: &Params,
    ic: &InitialConditions,
    controls: &IntegrationControls,
) -> Result<ClassificationReport> {
    let (a, b) = (params.a(), params.b());
    let (x0, th0) = (ic.x0(), ic.theta0());
    let (sin0, cos0) = th0.sin_cos();

    if b != 0.0 {
        let r_cyl = a / b;
        let theta_dot = a * sin0 / x0 + b;
        if close(x0, r_cyl.abs(), x0) && cos0.abs() < 1e-12 && theta_dot.abs() <= 1e-12 * b.abs().max(1.0) {
            let mut rep = base_report(SurfaceClass::Cylinder, params, ic);
            rep.radius = Some(x0);
            return Ok(rep);
        }
        if a != 1.0 && close(sin0 * (1.0 - a), b * x0, x0 * b.abs()) {
            return Ok(sphere_report(params, ic, b / (1.0 - a)));
        }
    } else {
        if sin0.abs() < 1e-15 {
            return Ok(base_report(SurfaceClass::Plane, params, ic));
        }
        if a == 1.0 {
            return Ok(sphere_report(params, ic, sin0 / x0));
        }
        let traj = integrate(params, ic, controls)?;
        let mut rep = base_report(SurfaceClass::Ovaloid, params, ic);
        rep.theta_range = theta_range(&traj);
        if a > 0.0 {
            rep.pole_z = pole_pair(&traj);
            return Ok(rep);
        }
        let m = first_integral_m(params, &ic.initial_state())?;
        rep.z_asymptote = catenoid_asymptote(m, a)?;
        rep.class = if rep.z_asymptote.is_some() {
            SurfaceClass::CatenoidBounded
        } else {
            SurfaceClass::CatenoidEntire
        };
        return Ok(rep);
    }

    let traj = integrate(params, ic, controls)?;
    let mut rep = base_report(SurfaceClass::Ovaloid, params, ic);
    rep.theta_range = theta_range(&traj);
    rep.self_intersections = 0;

    if traj.termination == Termination::EquilibriumDetected
        || traj.backward_termination == Termination::EquilibriumDetected
    {
        rep.class = SurfaceClass::Cylinder;
        rep.radius = Some(traj.samples.last().map_or(x0, |s| s.x));
        return Ok(rep);
    }

    if a > 0.0 {
        if let Some(d) = saddle_capture(&traj, a / b) {
            rep.class = SurfaceClass::CylindricalAntinodoid;
            rep.asymptotic_radius = Some(a / b);
            rep.pole_z = pole_pair(&traj);
            let _ = d;
            return Ok(rep);
        }
    }

    if traj.both_axis() {
        rep.pole_z = pole_pair(&traj);
        let [z1, z2] = rep.pole_z.expect("both branches hit the axis");
        rep.class = if theta_dot_single_signed(&traj) {
            SurfaceClass::Ovaloid
        } else if (z2 - z1).abs() < 1e-5 * x0 {
            SurfaceClass::PinchedSpheroid
        } else if z2 > z1 {
            SurfaceClass::Vesicle
        } else {
            SurfaceClass::ImmersedSpheroid
        };
        return Ok(rep);
    }

    if traj.has_full_turn() {
        let period = detect_period(&traj).map_err(|e| {
            Error::Inconclusive(format!("tangent turns fully but no period was verified: {e}"))
        })?;
        rep.theta_range = ThetaRange::Unbounded;
        rep.period = Some(period.t);
        rep.z_shift = Some(period.z_shift);
        rep.self_intersections = crossings_per_period(&traj, period.t);
        rep.class = if loops_toward_axis(&traj).unwrap_or(a < 0.0) {
            SurfaceClass::Nodoid
        } else {
            SurfaceClass::Antinodoid
        };
        return Ok(rep);
    }

    let open = |t: Termination| t == Termination::MaxArclength || t == Termination::MaxSteps;
    let vt_fwd = traj.events_of(EventKind::VerticalTangent).filter(|e| e.s > 0.0).count();
    let vt_bwd = traj.events_of(EventKind::VerticalTangent).filter(|e| e.s < 0.0).count();
    if open(traj.termination) && open(traj.backward_termination) && vt_fwd >= 2 && vt_bwd >= 2 {
        rep.class = SurfaceClass::Unduloid;
        rep.self_intersections = traj.crossings.len();
        return Ok(rep);
    }

    Err(Error::Inconclusive(format!(
        "forward {:?}, backward {:?}, theta range {:?}, {} vertical tangents, span [{}, {}]",
        traj.termination,
        traj.backward_termination,
        traj.theta_range(),
        vt_fwd + vt_bwd,
        traj.s_min(),
        traj.s_max()
    )))
}

/// A round sphere with signed curvature `kappa` through the initial point.
fn sphere_report(params: &Params, ic: &InitialConditions, kappa: f64) -> ClassificationReport {
    let class = if params.a() > 0.0 && params.a() != 1.0 {
        // Round spheres belong to the ovaloid family when a > 0.
        SurfaceClass::Ovaloid
    } else {
        SurfaceClass::Sphere
    };
    let mut rep = base_report(class, params, ic);
    let th0 = ic.theta0();
    let zc = th0.cos() / kappa;
    rep.radius = Some(1.0 / kappa.abs());
    rep.pole_z = Some([zc - 1.0 / kappa, zc + 1.0 / kappa]);
    // theta moves by the angle to the next multiple of pi in each direction.
    let k = (th0 / PI).floor();
    let (lo, hi) = (k * PI, (k + 1.0) * PI);
    rep.theta_range = ThetaRange::Bounded(lo, hi);
    rep
}

fn theta_range(traj: &Trajectory) -> ThetaRange {
    let (lo, hi) = traj.theta_range();
    ThetaRange::Bounded(lo, hi)
}

fn pole_pair(traj: &Trajectory) -> Option<[f64; 2]> {
    Some([traj.backward_pole?.z, traj.forward_pole?.z])
}

fn theta_dot_single_signed(traj: &Trajectory) -> bool {
    let (a, b) = (traj.params.a(), traj.params.b());
    let (mut pos, mut neg) = (false, false);
    for st in &traj.samples {
        if st.x <= traj.controls.axis_epsilon * 10.0 {
            continue;
        }
        let k = a * st.theta.sin() / st.x + b;
        pos |= k > 1e-9;
        neg |= k < -1e-9;
    }
    !(pos && neg)
}

/// Normalized closest approach to the saddle `(3 pi/2, a/b)` when it is
/// much closer than the starting point and below `1e-2`.
fn saddle_capture(traj: &Trajectory, r: f64) -> Option<f64> {
    let dist = |theta: f64, x: f64| {
        let dt = (theta - 3.0 * FRAC_PI_2).rem_euclid(2.0 * PI);
        let dt = dt.min(2.0 * PI - dt);
        dt.max((x - r).abs() / r)
    };
    let d0 = dist(traj.ic.theta0(), traj.ic.x0());
    let d_min = traj.samples.iter().map(|s| dist(s.theta, s.x)).fold(f64::INFINITY, f64::min);
    (d_min < 1e-2 && d_min < 0.1 * d0).then_some(d_min)
}

/// Self-intersections whose first parameter falls in one period window
/// well inside the integrated span.
fn crossings_per_period(traj: &Trajectory, t: f64) -> usize {
    let (lo, hi) = (traj.s_min(), traj.s_max());
    let start = if hi - lo >= 3.0 * t { lo + t } else { lo };
    traj.crossings
        .iter()
        .filter(|c| c.s1 >= start && c.s1 < start + t)
        .count()
}

/// Whether the tightest loop lies on the axis side of its crossing point.
fn loops_toward_axis(traj: &Trajectory) -> Option<bool> {
    let c = traj
        .crossings
        .iter()
        .min_by(|p, q| (p.s2 - p.s1).total_cmp(&(q.s2 - q.s1)))?;
    let n = 64;
    let mean_x = (0..n)
        .filter_map(|k| traj.state_at(c.s1 + (c.s2 - c.s1) * (k as f64 + 0.5) / n as f64))
        .map(|s| s.x)
        .sum::<f64>()
        / n as f64;
    Some(mean_x < c.x)
}
