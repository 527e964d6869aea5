use thiserror::Error;

use crate::model::PlaneState;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("equilibrium {0} does not exist for these parameters")]
    MissingEquilibrium(String),

    #[error("point ({x}, {y}) lies outside chart {chart}")]
    OutOfChart { chart: String, x: f64, y: f64 },

    #[error("blow-up branch parity does not match degree m = {m}")]
    ParityMismatch { m: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("start point ({}, {}) is an equilibrium", .0.x, .0.y)]
    EquilibriumStart(PlaneState),

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure {
        reason: String,
        t: f64,
        last: PlaneState,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
