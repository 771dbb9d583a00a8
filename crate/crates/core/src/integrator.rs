//! Adaptive integration of the profile ODE in both arclength directions,
//! with event detection, pole handling, period detection and symmetry probes.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::self_crossings;
use crate::model::{InitialConditions, Params, ProfileState};
use crate::ode::{bisect_root, DenseSegment, OdeSystem, StepOutcome, Stepper};

/// Step-size and termination controls. `max_arclength` and `max_steps`
/// apply to each branch separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationControls {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_arclength: f64,
    pub max_steps: usize,
    pub axis_epsilon: f64,
    pub event_refine_tol: f64,
    /// Radius, relative to the problem length scale, below which a curve
    /// heading into the axis with pole curvature is treated as reaching it
    /// (only used for `a < 0`, where the pole is repelling). Zero disables.
    pub pole_capture: f64,
}

impl Default for IntegrationControls {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_arclength: 200.0,
            max_steps: 2_000_000,
            axis_epsilon: 1e-8,
            event_refine_tol: 1e-12,
            pole_capture: 1e-3,
        }
    }
}

impl IntegrationControls {
    pub fn with_max_arclength(mut self, len: f64) -> Self {
        self.max_arclength = len;
        self
    }

    pub fn with_tolerances(mut self, rel: f64, abs: f64) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_arclength", self.max_arclength),
            ("axis_epsilon", self.axis_epsilon),
            ("event_refine_tol", self.event_refine_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParams("max_steps must be positive".into()));
        }
        if !(self.pole_capture >= 0.0) {
            return Err(Error::InvalidParams("pole_capture must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    AxisApproach,
    VerticalTangent,
    FullTurn,
    EquilibriumHold,
    SelfIntersection,
    Blowup,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: EventKind,
    pub s: f64,
    pub state: ProfileState,
    /// Second curve parameter of a self-intersection.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub partner_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    AxisReached,
    MaxArclength,
    MaxSteps,
    EquilibriumDetected,
    StepFailure,
}

/// Where a branch met the rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub s: f64,
    pub z: f64,
    /// True when the pole was extrapolated from a capture radius rather
    /// than reached at `axis_epsilon`.
    pub extrapolated: bool,
}

/// A self-intersection of the profile with `s1 < s2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub s1: f64,
    pub s2: f64,
    pub x: f64,
    pub z: f64,
}

/// An integrated profile curve over `[s_min, s_max]` containing `s = 0`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: Params,
    pub ic: InitialConditions,
    pub controls: IntegrationControls,
    pub samples: Vec<ProfileState>,
    pub events: Vec<EventRecord>,
    /// Termination of the forward (`s > 0`) branch.
    pub termination: Termination,
    /// Termination of the backward (`s < 0`) branch.
    pub backward_termination: Termination,
    pub forward_pole: Option<Pole>,
    pub backward_pole: Option<Pole>,
    pub crossings: Vec<Crossing>,
    segments: Vec<DenseSegment<3>>,
}

/// The profile ODE as a dense system in `(x, z, theta)`.
pub(crate) struct ProfileOde {
    pub a: f64,
    pub b: f64,
}

impl OdeSystem<3> for ProfileOde {
    fn derivative(&self, y: &[f64; 3]) -> [f64; 3] {
        let (sin, cos) = y[2].sin_cos();
        [cos, sin, self.a * sin / y[0] + self.b]
    }

    fn admissible(&self, y: &[f64; 3]) -> bool {
        y[0] > 0.0
    }

    fn max_step(&self, y: &[f64; 3], dy: &[f64; 3]) -> f64 {
        // Keeps stage radii positive and the turning per step below 0.5 rad.
        (0.5 * y[0]).min(0.5 / dy[2].abs())
    }

    fn error_scale(&self, i: usize, y0: &[f64; 3], y1: &[f64; 3], rtol: f64, atol: f64) -> f64 {
        let x = y0[0].abs().max(y1[0].abs());
        match i {
            0 => atol + rtol * x,
            1 => atol + rtol * x.max(y0[1].abs()).max(y1[1].abs()),
            _ => atol + rtol,
        }
    }
}

fn to_state(s: f64, y: &[f64; 3]) -> ProfileState {
    ProfileState::new(s, y[0], y[1], y[2])
}

pub(crate) struct BranchResult {
    pub samples: Vec<ProfileState>,
    pub segments: Vec<DenseSegment<3>>,
    pub events: Vec<EventRecord>,
    pub termination: Termination,
    pub pole: Option<Pole>,
}

/// Optional early stop used by shooting: called after every accepted step.
pub(crate) type StopPredicate<'a> = &'a dyn Fn(&ProfileState) -> bool;

pub(crate) fn integrate_branch(
    params: &Params,
    ic: &InitialConditions,
    controls: &IntegrationControls,
    dir: f64,
    stop: Option<StopPredicate<'_>>,
) -> BranchResult {
    let ode = ProfileOde { a: params.a(), b: params.b() };
    let theta0 = ic.theta0();
    let scale = params.length_scale(ic.x0());
    let h_max = controls.max_arclength / 128.0;
    let mut stepper = Stepper::new(
        &ode,
        0.0,
        [ic.x0(), 0.0, theta0],
        dir,
        controls.rel_tol,
        controls.abs_tol,
        h_max,
    );

    let mut samples = vec![ic.initial_state()];
    let mut segments: Vec<DenseSegment<3>> = Vec::new();
    let mut events = Vec::new();
    let mut equilibrium_run = 0usize;
    let capture_radius = if params.a() < 0.0 && params.b() != 0.0 {
        controls.pole_capture * scale
    } else {
        0.0
    };
    let pole_curvature = params.sphere_curvature();

    let termination = loop {
        if stepper.steps >= controls.max_steps {
            break Termination::MaxSteps;
        }
        let remaining = controls.max_arclength - stepper.s.abs();
        if remaining <= 1e-12 * controls.max_arclength {
            break Termination::MaxArclength;
        }
        stepper.clamp_next(remaining);
        let seg = match stepper.step() {
            StepOutcome::Accepted(seg) => seg,
            StepOutcome::Failed => break Termination::StepFailure,
        };
        let s_new = stepper.s;
        let y_new = stepper.y;

        if !y_new.iter().all(|v| v.is_finite()) || y_new[0] > 1e12 * scale {
            events.push(EventRecord {
                kind: EventKind::Blowup,
                s: s_new,
                state: to_state(s_new, &y_new),
                partner_s: None,
            });
            segments.push(seg);
            samples.push(to_state(s_new, &y_new));
            break Termination::StepFailure;
        }

        // Axis reached inside this step: truncate at x = axis_epsilon.
        let mut s_end = s_new;
        let mut axis_hit = false;
        if y_new[0] <= controls.axis_epsilon {
            let g = |s: f64| seg.eval(s)[0] - controls.axis_epsilon;
            s_end = bisect_root(seg.s_start, s_new, controls.event_refine_tol, g);
            axis_hit = true;
        }

        detect_step_events(&seg, seg.s_start, s_end, theta0, controls, &mut events);

        let end_state = to_state(s_end, &seg.eval(s_end));
        let end_state = if axis_hit { end_state } else { to_state(s_new, &y_new) };
        segments.push(seg);
        samples.push(end_state);

        if axis_hit {
            events.push(EventRecord {
                kind: EventKind::AxisApproach,
                s: s_end,
                state: end_state,
                partner_s: None,
            });
            let pole = Pole { s: s_end, z: end_state.z, extrapolated: false };
            return BranchResult {
                samples,
                segments,
                events,
                termination: Termination::AxisReached,
                pole: Some(pole),
            };
        }

        if capture_radius > 0.0 && y_new[0] < capture_radius {
            if let Some(kp) = pole_curvature {
                let heading_in = y_new[2].cos() * dir < 0.0;
                let consistent = ((y_new[2].sin() / y_new[0]) - kp).abs() <= 0.05 * kp.abs();
                if heading_in && consistent {
                    if let Some(pole) = extrapolate_pole(&segments, &y_new, s_new) {
                        let theta_p = ((y_new[2] - PI) / TAU).round() * TAU + PI;
                        events.push(EventRecord {
                            kind: EventKind::AxisApproach,
                            s: pole.s,
                            state: ProfileState::new(pole.s, 0.0, pole.z, theta_p),
                            partner_s: None,
                        });
                        return BranchResult {
                            samples,
                            segments,
                            events,
                            termination: Termination::AxisReached,
                            pole: Some(pole),
                        };
                    }
                }
            }
        }

        let dtheta = stepper.slope()[2];
        if dtheta.abs() < 1e-12 && y_new[2].cos().abs() < 1e-12 {
            equilibrium_run += 1;
            if equilibrium_run >= 100 {
                events.push(EventRecord {
                    kind: EventKind::EquilibriumHold,
                    s: s_new,
                    state: to_state(s_new, &y_new),
                    partner_s: None,
                });
                break Termination::EquilibriumDetected;
            }
        } else {
            equilibrium_run = 0;
        }

        if let Some(stop) = stop {
            if stop(&to_state(s_new, &y_new)) {
                break Termination::MaxArclength;
            }
        }
    };

    BranchResult { samples, segments, events, termination, pole: None }
}

/// Sign-change events inside one accepted step, refined by bisection.
fn detect_step_events(
    seg: &DenseSegment<3>,
    s_lo: f64,
    s_hi: f64,
    theta0: f64,
    controls: &IntegrationControls,
    events: &mut Vec<EventRecord>,
) {
    const SUB: usize = 4;
    let tol = controls.event_refine_tol;
    let mut push = |kind: EventKind, s: f64| {
        let y = seg.eval(s);
        events.push(EventRecord { kind, s, state: to_state(s, &y), partner_s: None });
    };
    for k in 0..SUB {
        let a = s_lo + (s_hi - s_lo) * k as f64 / SUB as f64;
        let b = s_lo + (s_hi - s_lo) * (k + 1) as f64 / SUB as f64;
        let ya = seg.eval(a);
        let yb = seg.eval(b);

        // Vertical tangent: cos(theta) changes sign. A root exactly at the
        // start of the branch counts; roots at interior step ends are
        // attributed to the step that ends there.
        let ca = ya[2].cos();
        let cb = yb[2].cos();
        if (ca > 0.0) != (cb > 0.0) && cb != 0.0 || (ca == 0.0 && a == 0.0) {
            let s = if ca == 0.0 { a } else { bisect_root(a, b, tol, |s| seg.eval(s)[2].cos()) };
            push(EventKind::VerticalTangent, s);
        } else if cb == 0.0 {
            push(EventKind::VerticalTangent, b);
        }

        // Full turns: theta crosses theta0 + 2 pi k for k != 0.
        let ka = ((ya[2] - theta0) / TAU).floor();
        let kb = ((yb[2] - theta0) / TAU).floor();
        if ka != kb {
            let (k_lo, k_hi) = if ka < kb { (ka + 1.0, kb) } else { (kb + 1.0, ka) };
            let mut k = k_lo;
            while k <= k_hi {
                if k != 0.0 {
                    let target = theta0 + TAU * k;
                    let s = bisect_root(a, b, tol, |s| seg.eval(s)[2] - target);
                    push(EventKind::FullTurn, s);
                }
                k += 1.0;
            }
        }
    }
}

/// Richardson extrapolation of the pole from radii `x, 2x, 4x` assuming the
/// profile near a regular pole is even in `x` (for `z`) and odd (for `s`).
fn extrapolate_pole(segments: &[DenseSegment<3>], y: &[f64; 3], s: f64) -> Option<Pole> {
    let x1 = y[0];
    let find = |target: f64| -> Option<(f64, f64)> {
        for seg in segments.iter().rev() {
            let y0 = seg.eval(seg.s_start);
            let y1 = seg.eval(seg.s_end());
            if (y0[0] - target) * (y1[0] - target) <= 0.0 {
                let sr = bisect_root(seg.s_start, seg.s_end(), 1e-14, |s| seg.eval(s)[0] - target);
                return Some((sr, seg.eval(sr)[1]));
            }
        }
        None
    };
    let (s2, z2) = find(2.0 * x1)?;
    let (s4, z4) = find(4.0 * x1)?;
    let (s1, z1) = (s, y[1]);

    let bz = ((z4 - z2) - 4.0 * (z2 - z1)) / 180.0;
    let az = ((z2 - z1) - 15.0 * bz) / 3.0;
    let z_pole = z1 - az - bz;

    let d3 = ((s4 - s2) - 2.0 * (s2 - s1)) / 42.0;
    let d1 = (s2 - s1) - 7.0 * d3;
    let s_pole = s1 - d1 - d3;
    Some(Pole { s: s_pole, z: z_pole, extrapolated: true })
}

/// Integrates the profile from `s = 0` forward and backward.
pub fn integrate(
    params: &Params,
    ic: &InitialConditions,
    controls: &IntegrationControls,
) -> Result<Trajectory> {
    controls.validate()?;
    if !(ic.x0() > controls.axis_epsilon) {
        return Err(Error::NonPositiveRadius(ic.x0()));
    }
    let fwd = integrate_branch(params, ic, controls, 1.0, None);
    let bwd = integrate_branch(params, ic, controls, -1.0, None);
    Ok(Trajectory::assemble(*params, *ic, *controls, fwd, bwd))
}

impl Trajectory {
    fn assemble(
        params: Params,
        ic: InitialConditions,
        controls: IntegrationControls,
        fwd: BranchResult,
        bwd: BranchResult,
    ) -> Self {
        let mut samples: Vec<ProfileState> = bwd.samples.iter().rev().copied().collect();
        samples.extend(fwd.samples.iter().skip(1).copied());
        let mut segments: Vec<DenseSegment<3>> = bwd.segments.into_iter().rev().collect();
        segments.extend(fwd.segments);

        let mut events = bwd.events;
        events.extend(fwd.events);
        // A vertical tangent at s = 0 is seen by both branches.
        events.sort_by(|p, q| p.s.total_cmp(&q.s));
        events.dedup_by(|p, q| p.kind == q.kind && (p.s - q.s).abs() <= controls.event_refine_tol);

        let mut traj = Self {
            params,
            ic,
            controls,
            samples,
            events,
            termination: fwd.termination,
            backward_termination: bwd.termination,
            forward_pole: fwd.pole,
            backward_pole: bwd.pole,
            crossings: Vec::new(),
            segments,
        };
        traj.crossings = traj.find_crossings();
        for c in &traj.crossings {
            if let Some(state) = traj.state_at(c.s1) {
                traj.events.push(EventRecord {
                    kind: EventKind::SelfIntersection,
                    s: c.s1,
                    state,
                    partner_s: Some(c.s2),
                });
            }
        }
        traj.events.sort_by(|p, q| p.s.total_cmp(&q.s));
        traj
    }

    pub fn s_min(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.s)
    }

    pub fn s_max(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.s)
    }

    pub fn both_axis(&self) -> bool {
        self.termination == Termination::AxisReached
            && self.backward_termination == Termination::AxisReached
    }

    /// Dense-output state at `s`, or `None` outside the integrated span.
    pub fn state_at(&self, s: f64) -> Option<ProfileState> {
        if !(s >= self.s_min() && s <= self.s_max()) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.samples[0]);
        }
        let idx = self.segments.partition_point(|seg| seg.hi() < s);
        let seg = self.segments.get(idx).or_else(|| self.segments.last())?;
        Some(to_state(s, &seg.eval(s)))
    }

    /// `theta'` at `s`, from the ODE right-hand side.
    pub fn theta_prime_at(&self, s: f64) -> Option<f64> {
        let st = self.state_at(s)?;
        Some(self.params.a() * st.theta.sin() / st.x + self.params.b())
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &EventRecord> + '_ {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// `(min, max)` of theta over the samples.
    pub fn theta_range(&self) -> (f64, f64) {
        self.samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), st| {
            (lo.min(st.theta), hi.max(st.theta))
        })
    }

    /// Whether the range of theta contains an interval of length `2 pi`.
    pub fn has_full_turn(&self) -> bool {
        let (lo, hi) = self.theta_range();
        hi - lo >= TAU
    }

    /// First `s` after `from` (in the direction of `dir`) where `x = target`.
    pub fn radius_crossing(&self, target: f64, from: f64, dir: f64) -> Option<f64> {
        let segs: Box<dyn Iterator<Item = &DenseSegment<3>>> = if dir > 0.0 {
            Box::new(self.segments.iter().filter(move |seg| seg.hi() > from))
        } else {
            Box::new(self.segments.iter().rev().filter(move |seg| seg.lo() < from))
        };
        for seg in segs {
            let (lo, hi) = (seg.lo().max(self.s_min()), seg.hi().min(self.s_max()));
            let (a, b) = if dir > 0.0 { (lo.max(from), hi) } else { (hi.min(from), lo) };
            let ga = seg.eval(a)[0] - target;
            let gb = seg.eval(b)[0] - target;
            if ga == 0.0 {
                return Some(a);
            }
            if (ga > 0.0) != (gb > 0.0) {
                return Some(bisect_root(a, b, self.controls.event_refine_tol, |s| {
                    seg.eval(s)[0] - target
                }));
            }
        }
        None
    }

    /// Samples of the curve subdivided along the dense output.
    pub fn dense_polyline(&self, per_step: usize) -> Vec<(f64, [f64; 2])> {
        let mut out = Vec::with_capacity(self.samples.len() * per_step);
        for w in self.samples.windows(2) {
            let (s0, s1) = (w[0].s, w[1].s);
            for k in 0..per_step {
                let s = s0 + (s1 - s0) * k as f64 / per_step as f64;
                let st = if k == 0 { w[0] } else { self.state_at(s).unwrap_or(w[0]) };
                out.push((s, [st.x, st.z]));
            }
        }
        if let Some(last) = self.samples.last() {
            out.push((last.s, [last.x, last.z]));
        }
        out
    }

    fn find_crossings(&self) -> Vec<Crossing> {
        let poly = self.dense_polyline(4);
        let pts: Vec<[f64; 2]> = poly.iter().map(|p| p.1).collect();
        let mut out: Vec<Crossing> = Vec::new();
        for c in self_crossings(&pts) {
            let s1 = poly[c.i].0 + c.t * (poly[c.i + 1].0 - poly[c.i].0);
            let s2 = poly[c.j].0 + c.u * (poly[c.j + 1].0 - poly[c.j].0);
            let (s1, s2) = self.refine_crossing(s1, s2);
            let Some(st) = self.state_at(s1) else { continue };
            // Chords can report one crossing twice near a vertex.
            if out.iter().any(|o| (o.s1 - s1).abs() < 1e-7 && (o.s2 - s2).abs() < 1e-7) {
                continue;
            }
            out.push(Crossing { s1, s2, x: st.x, z: st.z });
        }
        out.sort_by(|p, q| p.s1.total_cmp(&q.s1));
        out
    }

    /// Newton iteration on `gamma(s1) = gamma(s2)` using unit tangents.
    fn refine_crossing(&self, mut s1: f64, mut s2: f64) -> (f64, f64) {
        for _ in 0..20 {
            let (Some(p), Some(q)) = (self.state_at(s1), self.state_at(s2)) else { break };
            let fx = p.x - q.x;
            let fz = p.z - q.z;
            let (sp, cp) = p.theta.sin_cos();
            let (sq, cq) = q.theta.sin_cos();
            // J = [[cp, -cq], [sp, -sq]]
            let det = -cp * sq + cq * sp;
            if det.abs() < 1e-12 {
                break;
            }
            let d1 = (-sq * fx + cq * fz) / det;
            let d2 = (-sp * fx + cp * fz) / det;
            s1 -= d1;
            s2 -= d2;
            if d1.abs().max(d2.abs()) < 1e-14 {
                break;
            }
        }
        (s1, s2)
    }
}

/// Spatial period of a trajectory whose tangent turns by a full `2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub t: f64,
    pub z_shift: f64,
    /// Largest probe residual of `gamma(s + T) = gamma(s) + (0, 0, z_shift)`.
    pub residual: f64,
}

/// Finds the smallest `T > 0` with `theta(T) = theta(0) +- 2 pi` and
/// `x(T) = x(0)`, then verifies the translation at 16 probe points.
pub fn detect_period(traj: &Trajectory) -> Result<Period> {
    if !traj.has_full_turn() {
        return Err(Error::NoFullTurn);
    }
    let theta0 = traj.ic.theta0();
    let fwd = traj
        .events_of(EventKind::FullTurn)
        .filter(|e| e.s > 0.0 && ((e.state.theta - theta0).abs() - TAU).abs() < 1e-6)
        .map(|e| e.s)
        .next();
    let bwd = traj
        .events_of(EventKind::FullTurn)
        .filter(|e| e.s < 0.0 && ((e.state.theta - theta0).abs() - TAU).abs() < 1e-6)
        .map(|e| e.s)
        .last();
    let (t, dir) = match (fwd, bwd) {
        (Some(t), _) => (t, 1.0),
        (None, Some(t)) => (-t, -1.0),
        (None, None) => return Err(Error::NoFullTurn),
    };
    let x0 = traj.ic.x0();
    let end = traj.state_at(dir * t).ok_or(Error::OutOfRange(dir * t))?;
    if (end.x - x0).abs() > 1e-7 * x0.max(1.0) {
        return Err(Error::VerificationFailed { residual: (end.x - x0).abs(), tolerance: 1e-7 });
    }
    let z_shift = dir * end.z;

    // Probes over one period starting at the lower end of the covered range.
    let (lo, hi) = (traj.s_min(), traj.s_max());
    let start = if dir > 0.0 { 0.0f64.max(lo) } else { (-2.0 * t).max(lo) };
    let span = (hi - start - t).min(t);
    if span < 0.5 * t {
        return Err(Error::OutOfRange(start + 2.0 * t));
    }
    let mut residual: f64 = 0.0;
    for k in 0..16 {
        let s = start + span * k as f64 / 16.0;
        let (Some(p), Some(q)) = (traj.state_at(s), traj.state_at(s + t)) else {
            return Err(Error::OutOfRange(s + t));
        };
        residual = residual.max((q.x - p.x).abs() + (q.z - p.z - z_shift).abs());
    }
    if residual > 1e-6 {
        return Err(Error::VerificationFailed { residual, tolerance: 1e-6 });
    }
    Ok(Period { t, z_shift, residual })
}

/// Reflection residual about the horizontal line through a vertical tangent:
/// the max over probe offsets of `|x(s0+d) - x(s0-d)| + |z(s0+d) + z(s0-d) - 2 z(s0)|`.
pub fn check_horizontal_symmetry(traj: &Trajectory, s0: f64) -> Result<f64> {
    let c = traj.state_at(s0).ok_or(Error::OutOfRange(s0))?;
    let cos = c.theta.cos();
    if cos.abs() >= 1e-8 {
        return Err(Error::NotVertical { s: s0, cos_theta: cos });
    }
    let reach = (s0 - traj.s_min()).min(traj.s_max() - s0).min(10.0 * c.x.max(1.0));
    if !(reach > 0.0) {
        return Ok(0.0);
    }
    let mut residual: f64 = 0.0;
    for k in 1..=16 {
        let d = reach * k as f64 / 16.0;
        let (Some(p), Some(q)) = (traj.state_at(s0 + d), traj.state_at(s0 - d)) else { continue };
        residual = residual.max((p.x - q.x).abs() + (p.z + q.z - 2.0 * c.z).abs());
    }
    Ok(residual)
}
