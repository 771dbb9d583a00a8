//! JSON documents: trajectory events, classification reports and errors.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::integrator::{EventRecord, Pole, Termination, Trajectory};

#[derive(Debug, Clone, Serialize)]
pub struct EventsDocument<'a> {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub theta0: f64,
    pub termination: Termination,
    pub backward_termination: Termination,
    pub forward_pole: Option<Pole>,
    pub backward_pole: Option<Pole>,
    pub s_range: [f64; 2],
    pub events: &'a [EventRecord],
}

pub fn events_document(traj: &Trajectory) -> EventsDocument<'_> {
    EventsDocument {
        a: traj.params.a(),
        b: traj.params.b(),
        x0: traj.ic.x0(),
        theta0: traj.ic.theta0(),
        termination: traj.termination,
        backward_termination: traj.backward_termination,
        forward_pole: traj.forward_pole,
        backward_pole: traj.backward_pole,
        s_range: [traj.s_min(), traj.s_max()],
        events: &traj.events,
    }
}

/// Stable machine-readable name of an error variant.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParams(_) => "InvalidParams",
        Error::NonPositiveRadius(_) => "NonPositiveRadius",
        Error::NonPositiveScale(_) => "NonPositiveScale",
        Error::NotPureLinear(_) => "NotPureLinear",
        Error::DegenerateLine => "DegenerateLine",
        Error::NoFullTurn => "NoFullTurn",
        Error::VerificationFailed { .. } => "VerificationFailed",
        Error::NotVertical { .. } => "NotVertical",
        Error::OutOfRange(_) => "OutOfRange",
        Error::Degenerate => "Degenerate",
        Error::NoBracket(_) => "NoBracket",
        Error::Inconclusive(_) => "Inconclusive",
        Error::WrongSignRegime(_) => "WrongSignRegime",
        Error::QuadratureFailure { .. } => "QuadratureFailure",
        Error::Unsupported(_) => "Unsupported",
        Error::NearSingular => "NearSingular",
        Error::NotApplicable(_) => "NotApplicable",
        Error::DivergentIntegrand(_) => "DivergentIntegrand",
        Error::SignChange(_) => "SignChange",
        Error::ConstantCurvature => "ConstantCurvature",
        Error::NoPeriod => "NoPeriod",
        Error::DegenerateProfile(_) => "DegenerateProfile",
        Error::InvalidSpec(_) => "InvalidSpec",
        Error::Io(_) => "Io",
    }
}

pub fn error_document(e: &Error) -> Value {
    json!({ "error": error_kind(e), "message": e.to_string() })
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}
