use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("profile evaluated at s = {s} where f = {f:e} is inside the pole guard")]
    PoleProximity { s: f64, f: f64 },

    #[error("non-positive Gaussian curvature K = {k:e} at s = {s}")]
    NonPositiveCurvature { s: f64, k: f64 },

    #[error("f' changes sign {count} times on the grid (first at s = {first}); expected one equator")]
    MultipleCriticalPoints { count: usize, first: f64 },

    #[error("malformed profile samples: {0}")]
    Format(String),

    #[error("need at least {min} profile samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("surface failed validation: {0}")]
    Validation(String),

    #[error("Clairaut level c = {c} is outside the open range (0, {r_e}) in absolute value")]
    LevelOutOfRange { c: f64, r_e: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("no equator crossing before t = {t_max}")]
    Timeout { t_max: f64 },

    #[error("extrapolation did not converge: {0}")]
    NonConvergence(String),

    #[error("verdict inconclusive: sup = {sup}, distance to threshold {gap:e} within uncertainty {uncertainty:e}")]
    Inconclusive { sup: f64, gap: f64, uncertainty: f64 },

    #[error("invalid geodesic type ({p}, {q}): {reason}")]
    InvalidType { p: i64, q: i64, reason: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("diagram not in general position: {0}")]
    Degenerate(String),

    #[error("smoothing radius fell below {floor:e} near a double point")]
    DiscOverlap { floor: f64 },

    #[error("no empty bigon found among {crossings} crossings")]
    NoBigon { crossings: usize },

    #[error("trajectory did not close: residual {residual:e} exceeds {tol:e}")]
    ClosureResidual { residual: f64, tol: f64 },

    #[error("quadrature did not reach tolerance: estimated error {error:e}")]
    Quadrature { error: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
