//! Solvers for the reduced qubit dynamics and spectral analysis of their
//! output.

pub mod poles;
pub mod series;
pub mod single_term;
pub mod spectrum;

pub use poles::{laplace_poles, pole_expansion, pole_reconstruction_dynamics, PoleExpansion};
pub use series::{series_dynamics, SeriesSolver};
pub use single_term::{effective_frequency, single_term_dynamics, SingleTermSolution};
pub use spectrum::{spectrum, Peak, Spectrum};
