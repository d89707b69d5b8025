use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Coriolis frequency must be finite and nonnegative, got {0}")]
    InvalidOmega(f64),

    #[error("dispersion coefficient beta vanishes (beta = {beta:e}) at Omega = {omega}")]
    DegenerateBeta { omega: f64, beta: f64 },

    #[error("unsupported theta {0}: (1 - 3 theta)/theta must be an integer, theta = 1/n with n >= 1")]
    UnsupportedTheta(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation on the singular line at phi = {phi}")]
    Singularity { phi: f64 },

    #[error("first-integral self-check failed: relative defect {defect:e} at ({phi}, {y})")]
    ConservationCheck { defect: f64, phi: f64, y: f64 },

    #[error("point ({phi}, {y}) is not an equilibrium (|rhs| = {residual:e})")]
    NotEquilibrium { phi: f64, y: f64, residual: f64 },

    #[error("complete elliptic integral diverges at m = 1")]
    Divergent,

    #[error("elliptic parameter {0} outside [0, 1]")]
    ModulusOutOfRange(f64),

    #[error("level set is not polynomial in phi: {0}")]
    UnsupportedForClosedForm(String),

    #[error("root pattern mismatch: expected {expected}, found {found}")]
    WrongRootPattern { expected: String, found: String },

    #[error("ill-conditioned root cluster near {near} (separation {separation:e})")]
    IllConditioned { near: f64, separation: f64 },

    #[error("step size underflow at tau = {tau} (phi = {phi}, y = {y})")]
    StepUnderflow { tau: f64, phi: f64, y: f64 },

    #[error("region label {0} is a boundary or uncovered label; no prediction")]
    NoPrediction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
