//! Qualitative analysis of the generalized Duffing oscillator
//! `x' = y, y' = -alpha*y - epsilon*x^m - sigma*x`.

pub mod error;
pub mod finite;
pub mod infinity;
pub mod integrator;
pub mod model;
pub mod oracle;
pub mod portrait;
pub mod render;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Parameters, PlaneState};
