//! Rotational linear Weingarten surfaces `kappa1 = a kappa2 + b`: profile
//! integration, phase-plane analysis, classification and variational checks.

pub mod check;
pub mod classifier;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod io;
pub mod model;
pub mod ode;
pub mod phase;
pub mod quadrature;
pub mod sweep;
pub mod variational;

pub use error::{Error, Result};
pub use integrator::{
    check_horizontal_symmetry, detect_period, integrate, Crossing, EventKind, EventRecord,
    IntegrationControls, Period, Pole, Termination, Trajectory,
};
pub use model::{
    first_integral_m, parse_angle, principal_curvatures, reflect_b, rescale, rhs, wrap_angle,
    FirstIntegralValue, InitialConditions, Params, ProfileState,
};
