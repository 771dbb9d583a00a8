use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("radius must be positive, got x = {0}")]
    NonPositiveRadius(f64),

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("first integral requires b = 0, got b = {0}")]
    NotPureLinear(f64),

    #[error("degenerate line: sin(theta) = 0 gives m = 0")]
    DegenerateLine,

    #[error("trajectory has no full turn of the tangent angle")]
    NoFullTurn,

    #[error("period verification failed: residual {residual:e} exceeds {tolerance:e}")]
    VerificationFailed { residual: f64, tolerance: f64 },

    #[error("tangent is not vertical at s = {s}: |cos theta| = {cos_theta:e}")]
    NotVertical { s: f64, cos_theta: f64 },

    #[error("s = {0} lies outside the trajectory")]
    OutOfRange(f64),

    #[error("degenerate singularity: zero eigenvalue")]
    Degenerate,

    #[error("bracket endpoints classify identically ({0})")]
    NoBracket(String),

    #[error("classification inconclusive: {0}")]
    Inconclusive(String),

    #[error("operation requires a < 0, got a = {0}")]
    WrongSignRegime(f64),

    #[error("quadrature failed to reach tolerance: estimate {estimate}, error {error:e}")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("theta' - mu is within the singular band at every evaluated point")]
    NearSingular,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("integrand diverges or is undefined at s = {0}")]
    DivergentIntegrand(f64),

    #[error("theta' - mu changes sign at s = {0}")]
    SignChange(f64),

    #[error("curvature profile is constant")]
    ConstantCurvature,

    #[error("no period detected")]
    NoPeriod,

    #[error("degenerate profile: {0} usable samples, at least 16 required")]
    DegenerateProfile(usize),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
