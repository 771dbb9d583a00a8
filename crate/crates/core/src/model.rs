//! Domain types for the profile curve of a rotational surface with
//! `kappa1 = a * kappa2 + b`, the arclength ODE and its symmetry transforms.
//!
//! The generating curve is `gamma(s) = (x(s), 0, z(s))`, parametrized by
//! arclength, with tangent angle `theta`:
//!
//! ```text
//! x' = cos(theta)
//! z' = sin(theta)
//! theta' = a sin(theta) / x + b
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The Weingarten pair `(a, b)` in `kappa1 = a * kappa2 + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    a: f64,
    b: f64,
}

impl Params {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "a and b must be finite, got a = {a}, b = {b}"
            )));
        }
        if a == 0.0 {
            return Err(Error::InvalidParams("a must be nonzero".into()));
        }
        Ok(Self { a, b })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Radius of the circular cylinder solution `|a / b|`, if `b != 0`.
    pub fn cylinder_radius(&self) -> Option<f64> {
        (self.b != 0.0).then(|| (self.a / self.b).abs())
    }

    /// Signed curvature `b / (1 - a)` of the round-sphere profile, if any.
    pub fn sphere_curvature(&self) -> Option<f64> {
        (self.a != 1.0 && self.b != 0.0).then(|| self.b / (1.0 - self.a))
    }

    /// A characteristic length of the family used for budgets and scales.
    pub fn length_scale(&self, x0: f64) -> f64 {
        match self.cylinder_radius() {
            Some(r) => x0.max(r),
            None => x0,
        }
    }
}

/// One point of the generating curve. `theta` is unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
}

impl ProfileState {
    pub fn new(s: f64, x: f64, z: f64, theta: f64) -> Self {
        Self { s, x, z, theta }
    }
}

/// Initial data `x(0) = x0, z(0) = 0, theta(0) = theta0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    x0: f64,
    theta0: f64,
}

impl InitialConditions {
    pub fn new(x0: f64, theta0: f64) -> Result<Self> {
        if !(x0 > 0.0) || !x0.is_finite() {
            return Err(Error::NonPositiveRadius(x0));
        }
        if !theta0.is_finite() {
            return Err(Error::InvalidParams(format!("theta0 must be finite, got {theta0}")));
        }
        Ok(Self { x0, theta0 })
    }

    #[inline]
    pub fn x0(&self) -> f64 {
        self.x0
    }

    #[inline]
    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn initial_state(&self) -> ProfileState {
        ProfileState::new(0.0, self.x0, 0.0, self.theta0)
    }
}

/// The constant `m` in `x'^2 = 1 + m x^(2a)` for `b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstIntegralValue {
    m: f64,
}

impl FirstIntegralValue {
    pub fn new(m: f64) -> Result<Self> {
        if m == 0.0 {
            return Err(Error::DegenerateLine);
        }
        if !(m < 0.0) {
            return Err(Error::InvalidParams(format!("m must be negative, got {m}")));
        }
        Ok(Self { m })
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Radius where the tangent is vertical: `(-m)^(-1 / (2a))`.
    pub fn vertical_radius(&self, a: f64) -> f64 {
        (-self.m).powf(-1.0 / (2.0 * a))
    }
}

/// Derivatives `(x', z', theta')` of the profile ODE.
pub fn rhs(params: &Params, state: &ProfileState) -> Result<(f64, f64, f64)> {
    if !(state.x > 0.0) {
        return Err(Error::NonPositiveRadius(state.x));
    }
    let (sin, cos) = state.theta.sin_cos();
    Ok((cos, sin, params.a * sin / state.x + params.b))
}

/// Principal curvatures `(kappa1, kappa2)` with `kappa1 = theta'` of the
/// profile and `kappa2 = sin(theta) / x` of the parallel.
pub fn principal_curvatures(params: &Params, state: &ProfileState) -> Result<(f64, f64)> {
    if !(state.x > 0.0) {
        return Err(Error::NonPositiveRadius(state.x));
    }
    let k2 = state.theta.sin() / state.x;
    Ok((params.a * k2 + params.b, k2))
}

/// Orientation reversal: `(a, b), (x0, theta0) -> (a, -b), (x0, theta0 + pi)`.
/// The reflected solution traverses the same curve backwards.
pub fn reflect_b(params: &Params, ic: &InitialConditions) -> (Params, InitialConditions) {
    (
        Params { a: params.a, b: -params.b },
        InitialConditions { x0: ic.x0, theta0: ic.theta0 + PI },
    )
}

/// Homothety by `lambda`: `b -> b / lambda`, `x0 -> lambda x0`.
pub fn rescale(
    lambda: f64,
    params: &Params,
    ic: &InitialConditions,
) -> Result<(Params, InitialConditions)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveScale(lambda));
    }
    Ok((
        Params { a: params.a, b: params.b / lambda },
        InitialConditions { x0: lambda * ic.x0, theta0: ic.theta0 },
    ))
}

/// First integral `m = (cos^2 theta - 1) / x^(2a)` of the `b = 0` family.
pub fn first_integral_m(params: &Params, state: &ProfileState) -> Result<FirstIntegralValue> {
    if params.b != 0.0 {
        return Err(Error::NotPureLinear(params.b));
    }
    if !(state.x > 0.0) {
        return Err(Error::NonPositiveRadius(state.x));
    }
    let sin = state.theta.sin();
    if sin == 0.0 {
        return Err(Error::DegenerateLine);
    }
    // cos^2 - 1 = -sin^2, which avoids cancellation near theta = 0.
    let m = -(sin * sin) / state.x.powf(2.0 * params.a);
    FirstIntegralValue::new(m)
}

/// Reduces an angle to `[0, 2 pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Parses an angle in radians given either as a number or as a rational
/// multiple of pi such as `pi/2`, `3pi/2`, `-pi` or `2*pi/3`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase().replace('π', "pi").replace(' ', "");
    let bad = || Error::InvalidParams(format!("cannot parse angle `{text}`"));
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*');
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let v = coef * PI / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}
