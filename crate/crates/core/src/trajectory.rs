use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which solver produced a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    SingleTerm,
    Series,
    PoleReconstruction,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::SingleTerm => "single",
            Method::Series => "series",
            Method::PoleReconstruction => "poles",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s.trim() {
            "exact" => Some(Method::Exact),
            "single" | "single_term" => Some(Method::SingleTerm),
            "series" => Some(Method::Series),
            "poles" | "pole_reconstruction" => Some(Method::PoleReconstruction),
            _ => None,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Reduced qubit density-matrix samples ρ00(t), ρ10(t) on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitTrajectory {
    pub times: Vec<f64>,
    pub rho00: Vec<f64>,
    pub rho10: Vec<C64>,
    pub method: Method,
}

impl QubitTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn abs_rho10(&self) -> Vec<f64> {
        self.rho10.iter().map(|c| c.norm()).collect()
    }

    /// Index of the first sample violating 0 ≤ ρ00 ≤ 1 or
    /// |ρ10| ≤ √(ρ00 ρ11), both up to `tol`.
    pub fn positivity_violation(&self, tol: f64) -> Option<usize> {
        self.rho00.iter().zip(&self.rho10).position(|(&p, c)| {
            let bound = (p * (1.0 - p)).max(0.0).sqrt() + tol;
            p < -tol || p > 1.0 + tol || c.norm() > bound
        })
    }

    /// Spacing of a uniform grid.
    pub fn uniform_step(&self) -> Result<f64> {
        uniform_step(&self.times)
    }

    /// Largest |Δρ00| against another trajectory on the same grid.
    pub fn sup_distance(&self, other: &QubitTrajectory) -> f64 {
        self.rho00
            .iter()
            .zip(&other.rho00)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Spacing of a uniform grid (relative tolerance 1e-9 per step).
pub fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::param("times", "need at least two samples"));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if dt <= 0.0 {
        return Err(Error::param("times", "must be strictly increasing"));
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::NonUniformGrid { index: i + 1 });
        }
    }
    Ok(dt)
}

/// `n` samples `0, dt, 2dt, …`.
pub fn uniform_grid(n: usize, dt: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 * dt).collect()
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::param("times", "empty time grid"));
    }
    if times[0] != 0.0 {
        return Err(Error::param("times", "grid must start at t = 0"));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("times", "must be finite and ascending"));
    }
    Ok(())
}
