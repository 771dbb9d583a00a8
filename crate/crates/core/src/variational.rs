//! Curvature energies whose critical curves generate the surfaces:
//! exponent maps, Euler–Lagrange residuals, functional values, the
//! closed-form reconstruction of critical curves and the closure integral.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{detect_period, EventKind, Trajectory};
use crate::model::Params;
use crate::quadrature;

/// `int (theta' - mu)^p ds` with `p` not in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerEnergyParams {
    p: f64,
    mu: f64,
}

impl PowerEnergyParams {
    pub fn new(p: f64, mu: f64) -> Result<Self> {
        if !p.is_finite() || !mu.is_finite() || p == 0.0 || p == 1.0 {
            return Err(Error::InvalidParams(format!("power energy needs p not in {{0, 1}}, got p = {p}")));
        }
        Ok(Self { p, mu })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// `int exp(nu theta') ds` with `nu != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpEnergyParams {
    nu: f64,
}

impl ExpEnergyParams {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu == 0.0 {
            return Err(Error::InvalidParams(format!("exponential energy needs nu != 0, got {nu}")));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnergyParams {
    Power(PowerEnergyParams),
    Exp(ExpEnergyParams),
}

/// Positive scale `d` of a reconstructed critical curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalCurveScale(f64);

impl CriticalCurveScale {
    pub fn new(d: f64) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidParams(format!("scale d must be positive, got {d}")));
        }
        Ok(Self(d))
    }

    pub fn d(&self) -> f64 {
        self.0
    }
}

/// `(a, b) -> (p, mu) = (a/(a-1), -b/(a-1))`, or `nu = 1/b` when `a = 1`.
pub fn exponent_map(params: &Params) -> Result<EnergyParams> {
    let (a, b) = (params.a(), params.b());
    if a == 1.0 {
        if b == 0.0 {
            return Err(Error::Unsupported("a = 1, b = 0 is umbilical and has no energy".into()));
        }
        return Ok(EnergyParams::Exp(ExpEnergyParams::new(1.0 / b)?));
    }
    Ok(EnergyParams::Power(PowerEnergyParams::new(a / (a - 1.0), -b / (a - 1.0))?))
}

/// Inverse of [`exponent_map`].
pub fn inverse_exponent_map(ep: &EnergyParams) -> Result<Params> {
    match ep {
        EnergyParams::Power(e) => Params::new(e.p / (e.p - 1.0), -e.mu / (e.p - 1.0)),
        EnergyParams::Exp(e) => Params::new(1.0, 1.0 / e.nu),
    }
}

/// Curvature `k = theta'` with its first two arclength derivatives,
/// obtained by differentiating the profile ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureJet {
    pub k: f64,
    pub dk: f64,
    pub ddk: f64,
}

/// Analytic jet of `theta'` at a state with `x > 0`.
pub fn curvature_jet(params: &Params, x: f64, theta: f64) -> CurvatureJet {
    let a = params.a();
    let (sin, cos) = theta.sin_cos();
    let u = sin / x;
    let k = a * u + params.b();
    let du = cos * (k - u) / x;
    let dk = a * du;
    let ddu = (-sin * k * (k - u) + cos * (dk - du)) / x - cos * cos * (k - u) / (x * x);
    CurvatureJet { k, dk, ddk: a * ddu }
}

/// Residual of one Euler–Lagrange evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub s: f64,
    pub absolute: f64,
    /// `|E|` divided by the sum of the magnitudes of its terms.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualProfile {
    pub points: Vec<ResidualPoint>,
    /// Arclengths skipped because `|theta' - mu|` was in the singular band.
    pub excluded_singular: Vec<f64>,
    /// Arclengths skipped because the radius was below the near-axis cutoff.
    pub excluded_axis: Vec<f64>,
}

impl ResidualProfile {
    pub fn max_relative(&self) -> f64 {
        self.points.iter().map(|p| p.relative).fold(0.0, f64::max)
    }

    pub fn max_absolute(&self) -> f64 {
        self.points.iter().map(|p| p.absolute).fold(0.0, f64::max)
    }
}

const SINGULAR_BAND: f64 = 1e-6;
/// Samples closer to the axis than this fraction of the length scale are
/// skipped: the jet divides by `x^2` and loses all precision there.
const AXIS_CUTOFF: f64 = 1e-2;

fn residual_points(
    traj: &Trajectory,
    mu: f64,
    eval: impl Fn(CurvatureJet) -> (f64, f64),
) -> Result<ResidualProfile> {
    let cutoff = AXIS_CUTOFF * traj.params.length_scale(traj.ic.x0());
    let mut out = ResidualProfile { points: Vec::new(), excluded_singular: Vec::new(), excluded_axis: Vec::new() };
    for st in &traj.samples {
        if st.x < cutoff {
            out.excluded_axis.push(st.s);
            continue;
        }
        let jet = curvature_jet(&traj.params, st.x, st.theta);
        if (jet.k - mu).abs() <= SINGULAR_BAND {
            out.excluded_singular.push(st.s);
            continue;
        }
        let (e, scale) = eval(jet);
        let relative = if scale > 0.0 { e.abs() / scale } else { 0.0 };
        out.points.push(ResidualPoint { s: st.s, absolute: e.abs(), relative });
    }
    if out.points.is_empty() {
        return Err(Error::NearSingular);
    }
    Ok(out)
}

/// Residual of `d^2/ds^2 [w^(p-1)] + k^2 w^(p-1) - (k/p) w^p` with
/// `w = theta' - mu`. Points with `w < 0` are evaluated on the reversed
/// curve, which flips the signs of `k`, `k''` and `mu`.
pub fn el_residual_power(traj: &Trajectory, ep: &PowerEnergyParams) -> Result<ResidualProfile> {
    let (p, mu) = (ep.p, ep.mu);
    residual_points(traj, mu, |jet| {
        let (k, dk, ddk, mu) = if jet.k - mu < 0.0 { (-jet.k, jet.dk, -jet.ddk, -mu) } else { (jet.k, jet.dk, jet.ddk, mu) };
        let w = k - mu;
        let q = p - 1.0;
        let terms = [
            q * (q - 1.0) * w.powf(q - 2.0) * dk * dk,
            q * w.powf(q - 1.0) * ddk,
            k * k * w.powf(q),
            -(k / p) * w.powf(p),
        ];
        (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
    })
}

/// Residual of `d^2/ds^2 [e^(nu k)] + k^2 e^(nu k) - (k/nu) e^(nu k)`,
/// divided through by `e^(nu k)`.
pub fn el_residual_exp(traj: &Trajectory, ep: &ExpEnergyParams) -> Result<ResidualProfile> {
    if traj.params.a() != 1.0 {
        return Err(Error::NotApplicable(format!(
            "the exponential energy governs a = 1, trajectory has a = {}",
            traj.params.a()
        )));
    }
    let nu = ep.nu;
    let prof = residual_points(traj, f64::NAN, |jet| {
        let terms = [nu * jet.ddk, nu * nu * jet.dk * jet.dk, jet.k * jet.k, -jet.k / nu];
        (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
    })?;
    let ks: Vec<f64> = traj.samples.iter().map(|s| curvature_jet(&traj.params, s.x, s.theta).k).collect();
    let spread = ks.iter().fold(f64::NEG_INFINITY, |m, &k| m.max(k)) - ks.iter().fold(f64::INFINITY, |m, &k| m.min(k));
    if spread == 0.0 {
        return Err(Error::NotApplicable("theta' is constant".into()));
    }
    Ok(prof)
}

/// A curvature function `theta'(s)` on a closed interval.
pub trait CurvatureProfile {
    fn span(&self) -> (f64, f64);
    fn theta_prime(&self, s: f64) -> Option<f64>;
}

impl CurvatureProfile for Trajectory {
    fn span(&self) -> (f64, f64) {
        (self.s_min(), self.s_max())
    }

    fn theta_prime(&self, s: f64) -> Option<f64> {
        self.theta_prime_at(s)
    }
}

/// A curvature profile given by a closure.
pub struct FnProfile<F> {
    pub f: F,
    pub lo: f64,
    pub hi: f64,
}

impl<F: Fn(f64) -> f64> CurvatureProfile for FnProfile<F> {
    fn span(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn theta_prime(&self, s: f64) -> Option<f64> {
        (s >= self.lo && s <= self.hi).then(|| (self.f)(s))
    }
}

fn breakpoints(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

fn integrate_density(
    profile: &dyn CurvatureProfile,
    lo: f64,
    hi: f64,
    density: impl Fn(f64) -> f64,
) -> Result<f64> {
    let bad = std::cell::Cell::new(None);
    let f = |s: f64| {
        let v = profile.theta_prime(s).map(&density).unwrap_or(f64::NAN);
        if !v.is_finite() && bad.get().is_none() {
            bad.set(Some(s));
        }
        if v.is_finite() { v } else { 0.0 }
    };
    let pieces = ((hi - lo).abs().ceil() as usize).clamp(1, 4096);
    let q = quadrature::integrate_pieces(f, &breakpoints(lo, hi, pieces), 1e-10, 1e-12)?;
    if let Some(s) = bad.get() {
        return Err(Error::DivergentIntegrand(s));
    }
    Ok(q.value)
}

/// Energy of the profile over its whole span.
pub fn functional_value(profile: &dyn CurvatureProfile, ep: &EnergyParams) -> Result<f64> {
    let (lo, hi) = profile.span();
    match *ep {
        EnergyParams::Power(e) => integrate_density(profile, lo, hi, |k| (k - e.mu).powf(e.p)),
        EnergyParams::Exp(e) => integrate_density(profile, lo, hi, |k| (e.nu * k).exp()),
    }
}

/// A point of a reconstructed planar curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub s: f64,
    pub x: f64,
    pub z: f64,
}

fn check_profile(profile: &dyn CurvatureProfile, grid: &[f64], mu: Option<f64>) -> Result<Vec<f64>> {
    let ks: Vec<f64> = grid
        .iter()
        .map(|&s| profile.theta_prime(s).ok_or(Error::OutOfRange(s)))
        .collect::<Result<_>>()?;
    let (lo, hi) = ks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &k| (l.min(k), h.max(k)));
    if hi - lo <= 1e-12 * (1.0 + hi.abs().max(lo.abs())) {
        return Err(Error::ConstantCurvature);
    }
    if let Some(mu) = mu {
        let sign0 = ks[0] - mu > 0.0;
        for (s, k) in grid.iter().zip(&ks) {
            if (k - mu > 0.0) != sign0 || k - mu == 0.0 {
                return Err(Error::SignChange(*s));
            }
        }
    }
    Ok(ks)
}

fn reconstruct(
    profile: &dyn CurvatureProfile,
    n: usize,
    ks_check: Option<f64>,
    x_of: impl Fn(f64) -> f64,
    dz_of: impl Fn(f64) -> f64,
) -> Result<Vec<CurvePoint>> {
    if n < 2 {
        return Err(Error::InvalidParams("need at least two samples".into()));
    }
    let (lo, hi) = profile.span();
    let grid = breakpoints(lo, hi, n - 1);
    let fine = breakpoints(lo, hi, 8 * (n - 1));
    check_profile(profile, &fine, ks_check)?;
    let mut out = Vec::with_capacity(n);
    let mut z = 0.0;
    for (i, &s) in grid.iter().enumerate() {
        if i > 0 {
            z += integrate_density(profile, grid[i - 1], s, &dz_of)?;
        }
        let k = profile.theta_prime(s).ok_or(Error::OutOfRange(s))?;
        out.push(CurvePoint { s, x: x_of(k), z });
    }
    Ok(out)
}

/// The critical curve `x = d p |w|^(p-1)`, `z' = d |w|^(p-1) ((p-1) k + mu)`
/// with `w = k - mu` of one sign, sampled at `n` equally spaced arclengths.
/// For `p < 0` the curve lies in `x < 0`; it is congruent to the profile
/// after a half turn.
pub fn critical_curve_power(
    profile: &dyn CurvatureProfile,
    ep: &PowerEnergyParams,
    d: CriticalCurveScale,
    n: usize,
) -> Result<Vec<CurvePoint>> {
    let (p, mu, d) = (ep.p, ep.mu, d.d());
    reconstruct(
        profile,
        n,
        Some(mu),
        |k| d * p * (k - mu).abs().powf(p - 1.0),
        |k| d * (k - mu).abs().powf(p - 1.0) * ((p - 1.0) * k + mu),
    )
}

/// The critical curve `x = d nu e^(nu k)`, `z' = d (nu k - 1) e^(nu k)`.
pub fn critical_curve_exp(
    profile: &dyn CurvatureProfile,
    ep: &ExpEnergyParams,
    d: CriticalCurveScale,
    n: usize,
) -> Result<Vec<CurvePoint>> {
    let (nu, d) = (ep.nu, d.d());
    reconstruct(
        profile,
        n,
        None,
        |k| d * nu * (nu * k).exp(),
        |k| d * (nu * k - 1.0) * (nu * k).exp(),
    )
}

/// The scale `d` relating a profile point to its critical-curve formula,
/// `x / (p |k - mu|^(p-1))` or `x / (nu e^(nu k))`.
pub fn critical_curve_scale(params: &Params, x: f64, theta: f64, ep: &EnergyParams) -> f64 {
    let k = curvature_jet(params, x, theta).k;
    match *ep {
        EnergyParams::Power(e) => x / (e.p * (k - e.mu).abs().powf(e.p - 1.0)),
        EnergyParams::Exp(e) => x / (e.nu * (e.nu * k).exp()),
    }
}

/// Start and length of one period of `theta'`: the translation period for
/// curves whose tangent turns fully, otherwise the spacing of alternate
/// vertical tangents.
pub fn curvature_period(traj: &Trajectory) -> Result<(f64, f64)> {
    if let Ok(p) = detect_period(traj) {
        let start = if traj.s_max() >= p.t { 0.0 } else { -p.t };
        return Ok((start, p.t));
    }
    let vt: Vec<f64> = traj.events_of(EventKind::VerticalTangent).map(|e| e.s).collect();
    for w in vt.windows(3) {
        let (s0, t) = (w[0], w[2] - w[0]);
        let (Some(p), Some(q)) = (traj.state_at(s0), traj.state_at(s0 + t)) else { continue };
        let scale = traj.ic.x0().max(1.0);
        if (p.x - q.x).abs() < 1e-7 * scale && (p.theta - q.theta).abs() < 1e-7 {
            return Ok((s0, t));
        }
    }
    Err(Error::NoPeriod)
}

fn period_integral(
    profile: &dyn CurvatureProfile,
    ep: &PowerEnergyParams,
    window: (f64, f64),
    sign: f64,
) -> Result<f64> {
    let (p, mu) = (ep.p, ep.mu);
    let (s0, t) = window;
    let grid = breakpoints(s0, s0 + t, 256);
    let ks = check_profile(profile, &grid, None).or_else(|e| match e {
        Error::ConstantCurvature => Ok(grid.iter().filter_map(|&s| profile.theta_prime(s)).collect()),
        other => Err(other),
    })?;
    let integer_power = (p - 1.0).fract() == 0.0;
    let all_neg = ks.iter().all(|k| k - mu < 0.0);
    let all_pos = ks.iter().all(|k| k - mu > 0.0);
    if !integer_power && !all_neg && !all_pos {
        let s = grid.iter().zip(&ks).find(|(_, k)| (*k - mu > 0.0) != (ks[0] - mu > 0.0)).map_or(s0, |p| *p.0);
        return Err(Error::SignChange(s));
    }
    // On the reversed curve k and mu change sign, which makes w positive.
    let flip = if all_neg && !integer_power { -1.0 } else { 1.0 };
    let reduced = sign < 0.0 && mu == 0.0;
    integrate_density(profile, s0, s0 + t, |k| {
        let (k, mu) = (flip * k, flip * mu);
        if reduced {
            flip * k.powf(p)
        } else {
            flip * (k - mu).powf(p - 1.0) * ((p - 1.0) * k + sign * mu)
        }
    })
}

/// `int_0^T (theta' - mu)^(p-1) ((p-1) theta' - mu) ds` over one period.
/// For `mu = 0` the constant factor `p - 1` is dropped, leaving
/// `int_0^T theta'^p ds`.
pub fn closure_integral(traj: &Trajectory, ep: &PowerEnergyParams) -> Result<f64> {
    closure_integral_over(traj, ep, curvature_period(traj)?)
}

/// [`closure_integral`] over an explicit window `(s0, T)`.
pub fn closure_integral_over(profile: &dyn CurvatureProfile, ep: &PowerEnergyParams, window: (f64, f64)) -> Result<f64> {
    period_integral(profile, ep, window, -1.0)
}

/// `int_0^T (theta' - mu)^(p-1) ((p-1) theta' + mu) ds`: the height gained
/// over one period by the critical curve of scale `d = 1`.
pub fn period_height(traj: &Trajectory, ep: &PowerEnergyParams) -> Result<f64> {
    period_integral(traj, ep, curvature_period(traj)?, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(a: f64, b: f64) -> PowerEnergyParams {
        match exponent_map(&Params::new(a, b).unwrap()).unwrap() {
            EnergyParams::Power(e) => e,
            EnergyParams::Exp(_) => panic!("expected power"),
        }
    }

    #[test]
    fn exponent_map_examples() {
        let e = power(2.0, 0.0);
        assert_eq!((e.p(), e.mu()), (2.0, 0.0));
        let e = power(-1.0, 1.0);
        assert_eq!((e.p(), e.mu()), (0.5, 0.5));
        match exponent_map(&Params::new(1.0, 2.0).unwrap()).unwrap() {
            EnergyParams::Exp(e) => assert_eq!(e.nu(), 0.5),
            _ => panic!(),
        }
        assert!(matches!(exponent_map(&Params::new(1.0, 0.0).unwrap()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn inverse_examples() {
        let p = inverse_exponent_map(&EnergyParams::Power(PowerEnergyParams::new(2.0, 0.0).unwrap())).unwrap();
        assert_eq!((p.a(), p.b()), (2.0, 0.0));
        let p = inverse_exponent_map(&EnergyParams::Exp(ExpEnergyParams::new(0.5).unwrap())).unwrap();
        assert_eq!((p.a(), p.b()), (1.0, 2.0));
        let orig = Params::new(-3.0, 0.7).unwrap();
        let back = inverse_exponent_map(&exponent_map(&orig).unwrap()).unwrap();
        assert!((back.a() + 3.0).abs() < 1e-15 && (back.b() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn energy_params_reject_degenerate() {
        assert!(PowerEnergyParams::new(0.0, 1.0).is_err());
        assert!(PowerEnergyParams::new(1.0, 1.0).is_err());
        assert!(ExpEnergyParams::new(0.0).is_err());
        assert!(CriticalCurveScale::new(0.0).is_err());
    }

    #[test]
    fn jet_matches_finite_differences_of_the_ode() {
        // Independent check on a smooth solution via a Taylor step of the RHS.
        let params = Params::new(-2.0, 1.0).unwrap();
        let (x, th) = (1.3, 0.9);
        let jet = curvature_jet(&params, x, th);
        let k_at = |h: f64| {
            // Fourth-order Runge–Kutta from (x, theta) by h.
            let f = |x: f64, t: f64| (t.cos(), -2.0 * t.sin() / x + 1.0);
            let (k1x, k1t) = f(x, th);
            let (k2x, k2t) = f(x + 0.5 * h * k1x, th + 0.5 * h * k1t);
            let (k3x, k3t) = f(x + 0.5 * h * k2x, th + 0.5 * h * k2t);
            let (k4x, k4t) = f(x + h * k3x, th + h * k3t);
            let xn = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            let tn = th + h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
            -2.0 * tn.sin() / xn + 1.0
        };
        let h = 1e-3;
        let d1 = (k_at(h) - k_at(-h)) / (2.0 * h);
        let d2 = (k_at(h) - 2.0 * jet.k + k_at(-h)) / (h * h);
        assert!((d1 - jet.dk).abs() < 1e-6, "{d1} {}", jet.dk);
        assert!((d2 - jet.ddk).abs() < 1e-4, "{d2} {}", jet.ddk);
    }

    #[test]
    fn synthetic_profile_functional() {
        let prof = FnProfile { f: |_s: f64| 1.0, lo: 0.0, hi: 2.0 };
        let e = EnergyParams::Power(PowerEnergyParams::new(2.0, 0.0).unwrap());
        assert!((functional_value(&prof, &e).unwrap() - 2.0).abs() < 1e-12);
        let e = EnergyParams::Exp(ExpEnergyParams::new(1.0).unwrap());
        assert!((functional_value(&prof, &e).unwrap() - 2.0 * std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn constant_curvature_is_rejected() {
        let prof = FnProfile { f: |_s: f64| 1.0, lo: 0.0, hi: 2.0 };
        let e = PowerEnergyParams::new(2.0, 0.0).unwrap();
        assert_eq!(
            critical_curve_power(&prof, &e, CriticalCurveScale::new(1.0).unwrap(), 10),
            Err(Error::ConstantCurvature)
        );
    }

    #[test]
    fn sign_change_is_rejected() {
        let prof = FnProfile { f: |s: f64| s.sin(), lo: 0.5, hi: 4.0 };
        let e = PowerEnergyParams::new(2.0, 0.0).unwrap();
        assert!(matches!(
            critical_curve_power(&prof, &e, CriticalCurveScale::new(1.0).unwrap(), 10),
            Err(Error::SignChange(_))
        ));
    }
}
