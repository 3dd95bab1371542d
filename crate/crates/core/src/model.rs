//! Model parameters, unit handling and the derived polaron-frame scalars.
//!
//! All frequencies are angular. In [`UnitSystem::Physical`] they are in rad/s
//! and temperatures in kelvin; in [`UnitSystem::Natural`] ħ = k_B = 1 and
//! everything is dimensionless.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (exact SI value).
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant, J/K (exact SI value).
pub const KB: f64 = 1.380649e-23;

/// Default cutoff on the single-term validity parameter z.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// ħ = k_B = 1.
    Natural,
    /// rad/s and kelvin.
    #[default]
    Physical,
}

impl UnitSystem {
    pub fn hbar(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Physical => HBAR,
        }
    }

    pub fn kb(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Physical => KB,
        }
    }

    /// βω = ħω/(k_B T). Infinite at T = 0.
    pub fn thermal_ratio(self, omega: f64, temperature: f64) -> f64 {
        if temperature == 0.0 {
            return f64::INFINITY;
        }
        match self {
            UnitSystem::Natural => omega / temperature,
            UnitSystem::Physical => HBAR * omega / (KB * temperature),
        }
    }

    /// Inverse of [`thermal_ratio`](Self::thermal_ratio) for fixed ω.
    pub fn temperature_from_ratio(self, omega: f64, beta_omega: f64) -> f64 {
        if beta_omega.is_infinite() {
            return 0.0;
        }
        self.hbar() * omega / (self.kb() * beta_omega)
    }
}

/// The four frequencies of the Rabi Hamiltonian
/// `H = ε/2 σz + Δ/2 σx + ω a†a + g (a + a†) σz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    /// Qubit splitting ε.
    pub epsilon: f64,
    /// Tunnelling Δ.
    pub delta: f64,
    /// Oscillator frequency ω.
    pub omega: f64,
    /// Coupling g.
    pub g: f64,
}

impl RabiParams {
    pub fn new(epsilon: f64, delta: f64, omega: f64, g: f64) -> Result<Self> {
        let p = RabiParams {
            epsilon,
            delta,
            omega,
            g,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name, v: f64| {
            if !v.is_finite() || v < 0.0 {
                Err(Error::param(name, format!("must be finite and >= 0, got {v}")))
            } else {
                Ok(())
            }
        };
        finite_nonneg("epsilon", self.epsilon)?;
        finite_nonneg("delta", self.delta)?;
        finite_nonneg("g", self.g)?;
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return Err(Error::param(
                "omega",
                format!("must be finite and > 0, got {}", self.omega),
            ));
        }
        Ok(())
    }

    /// Bare Rabi frequency √(ε² + Δ²).
    pub fn rabi_frequency(&self) -> f64 {
        self.epsilon.hypot(self.delta)
    }

    /// Polaron displacement α = 2g/ω.
    pub fn alpha(&self) -> f64 {
        2.0 * self.g / self.omega
    }

    /// Same parameters with a different coupling.
    pub fn with_coupling(&self, g: f64) -> Self {
        RabiParams { g, ..*self }
    }
}

/// Thermal state of the oscillator mode. Temperature and occupation are two
/// views of the same quantity, linked by N = 1/(e^{βω} − 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalOscillator {
    pub omega: f64,
    pub temperature: f64,
    pub beta_omega: f64,
    pub units: UnitSystem,
}

impl ThermalOscillator {
    pub fn from_temperature(omega: f64, temperature: f64, units: UnitSystem) -> Result<Self> {
        check_omega(omega)?;
        if !temperature.is_finite() || temperature < 0.0 {
            return Err(Error::param(
                "temperature",
                format!("must be finite and >= 0, got {temperature}"),
            ));
        }
        Ok(ThermalOscillator {
            omega,
            temperature,
            beta_omega: units.thermal_ratio(omega, temperature),
            units,
        })
    }

    pub fn from_occupation(omega: f64, occupation: f64, units: UnitSystem) -> Result<Self> {
        check_omega(omega)?;
        if !occupation.is_finite() || occupation < 0.0 {
            return Err(Error::param(
                "occupation",
                format!("must be finite and >= 0, got {occupation}"),
            ));
        }
        let beta_omega = if occupation == 0.0 {
            f64::INFINITY
        } else {
            (1.0 / occupation).ln_1p()
        };
        Ok(ThermalOscillator {
            omega,
            temperature: units.temperature_from_ratio(omega, beta_omega),
            beta_omega,
            units,
        })
    }

    /// Mean occupation N.
    pub fn occupation(&self) -> f64 {
        occupation_from_ratio(self.beta_omega)
    }

    /// ln N, finite wherever N underflows but βω is finite.
    pub fn ln_occupation(&self) -> f64 {
        let x = self.beta_omega;
        if x.is_infinite() {
            return f64::NEG_INFINITY;
        }
        -x - (-(-x).exp_m1()).ln()
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::param("omega", format!("must be finite and > 0, got {omega}")));
    }
    Ok(())
}

fn occupation_from_ratio(beta_omega: f64) -> f64 {
    if beta_omega.is_infinite() {
        0.0
    } else {
        1.0 / beta_omega.exp_m1()
    }
}

/// Bose–Einstein occupation of a mode of frequency `omega` at temperature `t`.
pub fn occupation(omega: f64, t: f64, units: UnitSystem) -> Result<f64> {
    Ok(ThermalOscillator::from_temperature(omega, t, units)?.occupation())
}

/// Scalars of the polaron-frame correlation function.
///
/// `absorption` A = |α|²N and `emission` E = |α|²(N+1) satisfy A + E = b and
/// 2√(AE) = z. Their logarithms are kept separately so that the weighted
/// Bessel series stays representable when N underflows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolaronScalars {
    pub omega: f64,
    pub beta_omega: f64,
    pub alpha: f64,
    pub alpha_sq: f64,
    pub occupation: f64,
    pub b: f64,
    pub z: f64,
    pub absorption: f64,
    pub emission: f64,
    pub ln_absorption: f64,
    pub ln_emission: f64,
}

pub fn polaron_scalars(params: &RabiParams, osc: &ThermalOscillator) -> Result<PolaronScalars> {
    params.validate()?;
    check_omega(osc.omega)?;
    if (osc.omega - params.omega).abs() > 1e-12 * params.omega {
        return Err(Error::param(
            "omega",
            format!(
                "oscillator frequency {} differs from model frequency {}",
                osc.omega, params.omega
            ),
        ));
    }
    let alpha = params.alpha();
    let alpha_sq = alpha * alpha;
    let n = osc.occupation();
    let ln_alpha_sq = alpha_sq.ln();
    let ln_absorption = ln_alpha_sq + osc.ln_occupation();
    let ln_emission = if osc.beta_omega.is_infinite() {
        ln_alpha_sq
    } else {
        ln_absorption + osc.beta_omega
    };
    Ok(PolaronScalars {
        omega: params.omega,
        beta_omega: osc.beta_omega,
        alpha,
        alpha_sq,
        occupation: n,
        b: alpha_sq * (2.0 * n + 1.0),
        z: 2.0 * alpha_sq * (n * (n + 1.0)).sqrt(),
        absorption: alpha_sq * n,
        emission: alpha_sq * (n + 1.0),
        ln_absorption,
        ln_emission,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Validity {
    pub z: f64,
    pub threshold: f64,
    pub valid: bool,
}

/// Whether the zeroth harmonic dominates the correlation series (z below
/// [`DEFAULT_VALIDITY_THRESHOLD`]).
pub fn single_term_validity(scalars: &PolaronScalars) -> Validity {
    single_term_validity_with(scalars, DEFAULT_VALIDITY_THRESHOLD)
}

pub fn single_term_validity_with(scalars: &PolaronScalars, threshold: f64) -> Validity {
    Validity {
        z: scalars.z,
        threshold,
        valid: scalars.z < threshold,
    }
}
