//! Dormand–Prince 5(4) stepping with continuous (dense) output.
//!
//! The stepper is generic over fixed-size systems so the arclength profile
//! ODE and the autonomous phase-plane field share one implementation.

/// A first-order autonomous system `y' = f(y)` of dimension `N`.
pub trait OdeSystem<const N: usize> {
    fn derivative(&self, y: &[f64; N]) -> [f64; N];

    /// Whether a stage state may be evaluated at all.
    fn admissible(&self, _y: &[f64; N]) -> bool {
        true
    }

    /// Largest step magnitude allowed from `y` with slope `dy`.
    fn max_step(&self, _y: &[f64; N], _dy: &[f64; N]) -> f64 {
        f64::INFINITY
    }

    /// Error scale for component `i` between the old and new states.
    fn error_scale(&self, i: usize, y0: &[f64; N], y1: &[f64; N], rtol: f64, atol: f64) -> f64 {
        atol + rtol * y0[i].abs().max(y1[i].abs())
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension of one accepted step, valid for `s` between
/// `s_start` and `s_start + h` (`h` may be negative).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment<const N: usize> {
    pub s_start: f64,
    pub h: f64,
    coeffs: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    pub fn s_end(&self) -> f64 {
        self.s_start + self.h
    }

    pub fn lo(&self) -> f64 {
        self.s_start.min(self.s_end())
    }

    pub fn hi(&self) -> f64 {
        self.s_start.max(self.s_end())
    }

    pub fn eval(&self, s: f64) -> [f64; N] {
        let t = (s - self.s_start) / self.h;
        let t1 = 1.0 - t;
        let c = &self.coeffs;
        std::array::from_fn(|i| {
            c[0][i] + t * (c[1][i] + t1 * (c[2][i] + t * (c[3][i] + t1 * c[4][i])))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome<const N: usize> {
    Accepted(DenseSegment<N>),
    /// The controller could not find an admissible step above the minimum size.
    Failed,
}

/// Adaptive Dormand–Prince stepper. Integrates in the direction of `dir`.
pub struct Stepper<'a, S, const N: usize> {
    system: &'a S,
    pub s: f64,
    pub y: [f64; N],
    k1: [f64; N],
    h: f64,
    dir: f64,
    rtol: f64,
    atol: f64,
    h_max: f64,
    pub steps: usize,
    pub rejected: usize,
}

impl<'a, S: OdeSystem<N>, const N: usize> Stepper<'a, S, N> {
    pub fn new(
        system: &'a S,
        s0: f64,
        y0: [f64; N],
        dir: f64,
        rtol: f64,
        atol: f64,
        h_max: f64,
    ) -> Self {
        let k1 = system.derivative(&y0);
        let mut st = Self {
            system,
            s: s0,
            y: y0,
            k1,
            h: 0.0,
            dir: dir.signum(),
            rtol,
            atol,
            h_max,
            steps: 0,
            rejected: 0,
        };
        st.h = st.initial_step();
        st
    }

    /// Derivative at the current state.
    pub fn slope(&self) -> &[f64; N] {
        &self.k1
    }

    fn norm(&self, v: &[f64; N], y: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = self.system.error_scale(i, y, y, self.rtol, self.atol);
            acc += (v[i] / sc).powi(2);
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step(&self) -> f64 {
        let d0 = self.norm(&self.y, &self.y);
        let d1 = self.norm(&self.k1, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.h_max).min(self.system.max_step(&self.y, &self.k1));
        let y1: [f64; N] = std::array::from_fn(|i| self.y[i] + self.dir * h0 * self.k1[i]);
        if !self.system.admissible(&y1) {
            return h0 * 0.1;
        }
        let f1 = self.system.derivative(&y1);
        let diff: [f64; N] = std::array::from_fn(|i| f1[i] - self.k1[i]);
        let d2 = self.norm(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.h_max).min(self.system.max_step(&self.y, &self.k1))
    }

    /// Caps the next step magnitude (e.g. to land on a span limit).
    pub fn clamp_next(&mut self, limit: f64) {
        self.h = self.h.min(limit);
    }

    fn stage(&self, coefs: &[(f64, &[f64; N])], h: f64) -> Option<[f64; N]> {
        let y: [f64; N] = std::array::from_fn(|i| {
            self.y[i] + h * coefs.iter().map(|(c, k)| c * k[i]).sum::<f64>()
        });
        if y.iter().all(|v| v.is_finite()) && self.system.admissible(&y) {
            Some(y)
        } else {
            None
        }
    }

    fn eval(&self, y: &[f64; N]) -> Option<[f64; N]> {
        let d = self.system.derivative(y);
        d.iter().all(|v| v.is_finite()).then_some(d)
    }

    /// Attempts steps until one is accepted or the step size underflows.
    pub fn step(&mut self) -> StepOutcome<N> {
        let h_min = 1e-14 * self.s.abs().max(1.0);
        loop {
            let cap = self.system.max_step(&self.y, &self.k1).min(self.h_max);
            let mag = self.h.min(cap);
            if !(mag > h_min) {
                return StepOutcome::Failed;
            }
            let h = self.dir * mag;
            match self.try_step(h) {
                Some((seg, y_new, k7, err)) => {
                    if err <= 1.0 {
                        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                        self.s += h;
                        self.y = y_new;
                        self.k1 = k7;
                        self.h = mag * fac;
                        self.steps += 1;
                        return StepOutcome::Accepted(seg);
                    }
                    self.rejected += 1;
                    self.h = mag * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                }
                None => {
                    self.rejected += 1;
                    self.h = mag * 0.25;
                }
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn try_step(&self, h: f64) -> Option<(DenseSegment<N>, [f64; N], [f64; N], f64)> {
        let k1 = self.k1;
        let y2 = self.stage(&[(A21, &k1)], h)?;
        let k2 = self.eval(&y2)?;
        let y3 = self.stage(&[(A31, &k1), (A32, &k2)], h)?;
        let k3 = self.eval(&y3)?;
        let y4 = self.stage(&[(A41, &k1), (A42, &k2), (A43, &k3)], h)?;
        let k4 = self.eval(&y4)?;
        let y5 = self.stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h)?;
        let k5 = self.eval(&y5)?;
        let y6 = self.stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h)?;
        let k6 = self.eval(&y6)?;
        let y7 = self.stage(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h)?;
        let k7 = self.eval(&y7)?;

        let mut acc = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.system.error_scale(i, &self.y, &y7, self.rtol, self.atol);
            acc += (e / sc).powi(2);
        }
        let err = (acc / N as f64).sqrt();
        if !err.is_finite() {
            return None;
        }

        let mut coeffs = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y7[i] - self.y[i];
            let bspl = h * k1[i] - ydiff;
            coeffs[0][i] = self.y[i];
            coeffs[1][i] = ydiff;
            coeffs[2][i] = bspl;
            coeffs[3][i] = ydiff - h * k7[i] - bspl;
            coeffs[4][i] = h
                * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        Some((DenseSegment { s_start: self.s, h, coeffs }, y7, k7, err))
    }
}

/// Finds a root of `g` on `[lo, hi]` given a sign change, by bisection to `tol`.
pub fn bisect_root(mut lo: f64, mut hi: f64, tol: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut g_lo = g(lo);
    if g_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
