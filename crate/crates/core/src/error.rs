use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radial function is not positive (min r = {min_radius:.3e})")]
    NonPositiveRadius { min_radius: f64 },

    #[error("conformal coefficients fail the univalence test (|c1| - sum n|c_n| = {margin:.3e})")]
    UnivalenceViolation { margin: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("interior grid too coarse: {points} points inside (need at least 50)")]
    GridTooCoarse { points: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("center repulsion did not reach the spacing target ({min_spacing:.3e} < {target:.3e})")]
    RepelFailure { min_spacing: f64, target: f64 },

    #[error("no eigenvalue found in the scan window (best relative sigma {best_sigma:.3e})")]
    NoEigenvalueFound { best_sigma: f64 },

    #[error("mass matrix too degenerate: {modes} modes survive truncation (need 10)")]
    MassDegenerate { modes: usize },

    #[error("bracket [{lo}, {hi}] does not change sign (mu = {mu_lo:.3e}, {mu_hi:.3e})")]
    BadBracket {
        lo: f64,
        hi: f64,
        mu_lo: f64,
        mu_hi: f64,
    },

    #[error("could not draw a valid random domain for seed {seed}")]
    GenerationFailure { seed: u64 },

    #[error("operation needs a conformal-polynomial domain")]
    NotConformal,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification used for process exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Domain,
    Solver,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NonPositiveRadius { .. }
            | Error::UnivalenceViolation { .. }
            | Error::InvalidDomain(_)
            | Error::GridTooCoarse { .. }
            | Error::GenerationFailure { .. }
            | Error::NotConformal => ErrorClass::Domain,
            Error::RepelFailure { .. }
            | Error::NoEigenvalueFound { .. }
            | Error::MassDegenerate { .. }
            | Error::BadBracket { .. } => ErrorClass::Solver,
            Error::Precondition(_) | Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => {
                ErrorClass::Usage
            }
        }
    }
}
