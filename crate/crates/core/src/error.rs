use thiserror::Error;

use crate::dynamics::Trajectory;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid simplex state ({x}, {y}, {z}): {reason}")]
    InvalidState {
        x: f64,
        y: f64,
        z: f64,
        reason: &'static str,
    },

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    Domain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("orientation angle is undefined for alpha = beta = 0")]
    UndefinedOrientation,

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The step-size controller could not meet the tolerance. Carries the
    /// trajectory recorded up to the failure point.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow {
        t: f64,
        h: f64,
        partial: Box<Trajectory>,
    },

    #[error("step limit reached at t = {t}")]
    StepLimit { t: f64, partial: Box<Trajectory> },

    #[error("trajectory too short for classification: {0}")]
    TrajectoryTooShort(String),

    #[error("grid geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
