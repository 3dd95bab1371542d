//! Qubit–oscillator (Rabi model) dynamics computed three ways, and
//! thermometry of the oscillator from the temperature dependence of the
//! qubit's effective frequency.

pub mod commands;
pub mod config;
pub mod correlation;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod model;
pub mod special;
pub mod thermometry;
pub mod trajectory;

pub use error::{Error, Result};
pub use model::{RabiParams, ThermalOscillator, UnitSystem};
pub use trajectory::{Method, QubitTrajectory};
