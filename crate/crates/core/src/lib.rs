//! Spinorial description of surfaces in three-dimensional pseudo-Riemannian
//! space forms: Clifford models, surface charts, ambient presets, Killing
//! spinor transport and reconstruction of the immersion from spinor data.

pub mod ambient;
pub mod chart;
pub mod clifford;
pub mod error;
pub mod reconstruction;
pub mod report;
pub mod transport;

pub use error::{Error, Result};
