use thiserror::Error;

/// Errors raised by the kinematic model and the collision searches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("velocity is zero; longitudinal/lateral decomposition undefined")]
    ZeroVelocity,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("time {t} outside trajectory domain [{start}, {end}]")]
    OutOfHorizon { t: f64, start: f64, end: f64 },

    #[error("point is not on the circular trajectory (off by {offset} m)")]
    OffCircle { offset: f64 },

    #[error("both vehicles are stationary; no trajectory lines exist")]
    BothStationary,

    #[error("vehicle states have different start times ({0} vs {1})")]
    StartTimeMismatch(f64, f64),

    #[error("integrator step size fell below {min_step} s at t = {t}")]
    StepSizeUnderflow { t: f64, min_step: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
