use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{polaron_scalars, single_term_validity, RabiParams, ThermalOscillator};
use crate::special::bessel_i;
use crate::trajectory::{check_times, Method, QubitTrajectory};

/// Closed-form dynamics keeping only the zeroth harmonic of C(τ).
///
/// The oscillator renormalizes the tunnelling by `reduction = e^{-b} I_0(z)`,
/// giving the temperature-dependent frequency `Ω = √(Δ² e^{-b} I_0(z) + ε²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingleTermSolution {
    pub epsilon: f64,
    pub delta: f64,
    pub omega_eff: f64,
    pub rho0: f64,
    pub b: f64,
    pub z: f64,
    pub reduction: f64,
    pub valid: bool,
}

impl SingleTermSolution {
    pub fn new(params: &RabiParams, osc: &ThermalOscillator, rho0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho0) {
            return Err(Error::param("rho0", format!("must lie in [0, 1], got {rho0}")));
        }
        let s = polaron_scalars(params, osc)?;
        let reduction = (-s.b).exp() * bessel_i(0, s.z);
        let omega_eff = (params.delta * params.delta * reduction + params.epsilon * params.epsilon).sqrt();
        Ok(SingleTermSolution {
            epsilon: params.epsilon,
            delta: params.delta,
            omega_eff,
            rho0,
            b: s.b,
            z: s.z,
            reduction,
            valid: single_term_validity(&s).valid,
        })
    }

    pub fn rho00(&self, t: f64) -> f64 {
        let w = self.omega_eff;
        if w == 0.0 {
            return self.rho0;
        }
        let d2 = self.delta * self.delta * self.reduction;
        (self.rho0 * self.epsilon * self.epsilon
            + 0.5 * d2 * ((2.0 * self.rho0 - 1.0) * (w * t).cos() + 1.0))
            / (w * w)
    }

    pub fn rho10(&self, t: f64) -> C64 {
        let w = self.omega_eff;
        if w == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let (s, c) = (w * t).sin_cos();
        let pre = -self.reduction * self.delta * (2.0 * self.rho0 - 1.0) / (2.0 * w * w);
        C64::new(self.epsilon * (c - 1.0), w * s) * pre
    }

    /// The two values between which ρ00(t) oscillates (cos Ωt = ±1).
    pub fn extrema(&self) -> (f64, f64) {
        let w = self.omega_eff;
        let a = self.rho00(0.0);
        let b = if w == 0.0 {
            a
        } else {
            self.rho00(std::f64::consts::PI / w)
        };
        (a.min(b), a.max(b))
    }
}

/// Ω = √(Δ² e^{-b} I_0(z) + ε²).
pub fn effective_frequency(params: &RabiParams, osc: &ThermalOscillator) -> Result<f64> {
    Ok(SingleTermSolution::new(params, osc, 1.0)?.omega_eff)
}

/// Single-term closed form sampled on `times`. Logs a warning when the
/// validity criterion fails but still computes.
pub fn single_term_dynamics(
    params: &RabiParams,
    osc: &ThermalOscillator,
    rho0: f64,
    times: &[f64],
) -> Result<QubitTrajectory> {
    check_times(times)?;
    let sol = SingleTermSolution::new(params, osc, rho0)?;
    if !sol.valid {
        log::warn!(
            "single-term approximation outside its validity range (z = {:.3})",
            sol.z
        );
    }
    Ok(QubitTrajectory {
        times: times.to_vec(),
        rho00: times.iter().map(|&t| sol.rho00(t)).collect(),
        rho10: times.iter().map(|&t| sol.rho10(t)).collect(),
        method: Method::SingleTerm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UnitSystem;
    use approx::assert_relative_eq;

    fn osc(omega: f64, t: f64) -> ThermalOscillator {
        ThermalOscillator::from_temperature(omega, t, UnitSystem::Physical).unwrap()
    }

    #[test]
    fn uncoupled_limit_is_bare_rabi() {
        let p = RabiParams::new(1e8, 1e8, 1e9, 0.0).unwrap();
        let o = osc(1e9, 0.01);
        let wr = p.rabi_frequency();
        assert_eq!(effective_frequency(&p, &o).unwrap(), wr);
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 1e-9).collect();
        let traj = single_term_dynamics(&p, &o, 1.0, &times).unwrap();
        for (t, r) in times.iter().zip(&traj.rho00) {
            let want = (1e16 + 1e16 * (1.0 + (wr * t).cos()) / 2.0) / (wr * wr);
            assert!((r - want).abs() < 1e-14);
        }
    }

    #[test]
    fn half_filled_start_is_stationary() {
        let p = RabiParams::new(1e8, 1e8, 1e9, 1e8).unwrap();
        let o = osc(1e9, 0.01);
        let sol = SingleTermSolution::new(&p, &o, 0.5).unwrap();
        let level = (0.5e16 + 0.5 * sol.reduction * 1e16) / sol.omega_eff.powi(2);
        for i in 0..50 {
            let t = i as f64 * 3.1e-9;
            assert_relative_eq!(sol.rho00(t), level, max_relative = 1e-14);
            assert_eq!(sol.rho10(t), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn no_tunnelling_freezes_population() {
        let p = RabiParams::new(1e8, 0.0, 1e9, 1e8).unwrap();
        let sol = SingleTermSolution::new(&p, &osc(1e9, 0.01), 0.9).unwrap();
        assert_eq!(sol.omega_eff, 1e8);
        for i in 0..20 {
            assert_relative_eq!(sol.rho00(i as f64 * 7e-9), 0.9, max_relative = 1e-15);
        }
    }

    #[test]
    fn cold_unbiased_frequency() {
        let p = RabiParams::new(0.0, 1e8, 1e9, 1e8).unwrap();
        let w = effective_frequency(&p, &osc(1e9, 0.0)).unwrap();
        assert_relative_eq!(w, 1e8 * (-0.5 * p.alpha() * p.alpha()).exp(), max_relative = 1e-15);
    }

    // mpmath at 30 digits: N(30 mK) then b, z, I0(z) for the thermometry
    // parameters.
    #[test]
    fn thermometry_regression_value() {
        let p = RabiParams::new(0.0, 1e8, 1e9, 1e7).unwrap();
        let w = effective_frequency(&p, &osc(1e9, 0.030)).unwrap();
        assert_relative_eq!(w, 99842295.0455197, max_relative = 1e-13);
    }

    #[test]
    fn frequency_bounds() {
        for g in [0.0, 1e7, 1e8, 5e8] {
            let p = RabiParams::new(0.6e8, 1e8, 1e9, g).unwrap();
            let sol = SingleTermSolution::new(&p, &osc(1e9, 0.02), 1.0).unwrap();
            assert!(sol.omega_eff >= p.epsilon);
            assert!(sol.omega_eff <= p.rabi_frequency());
            assert!(sol.reduction > 0.0 && sol.reduction <= 1.0);
            if g > 0.0 {
                assert!(sol.omega_eff < p.rabi_frequency());
                assert!(sol.reduction < 1.0);
            }
        }
    }

    #[test]
    fn sampled_extrema_match_closed_form() {
        let p = RabiParams::new(1e8, 1e8, 1e9, 2.5e8).unwrap();
        let sol = SingleTermSolution::new(&p, &osc(1e9, 0.01), 1.0).unwrap();
        let half = std::f64::consts::PI / sol.omega_eff;
        let times: Vec<f64> = (0..=400).map(|i| i as f64 * half / 40.0).collect();
        let traj = single_term_dynamics(&p, &osc(1e9, 0.01), 1.0, &times).unwrap();
        let lo = traj.rho00.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = traj.rho00.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (want_lo, want_hi) = sol.extrema();
        assert!((lo - want_lo).abs() < 1e-9);
        assert!((hi - want_hi).abs() < 1e-9);
    }

    #[test]
    fn scale_covariance() {
        let p = RabiParams::new(0.3, 0.7, 1.1, 0.2).unwrap();
        let o = ThermalOscillator::from_temperature(1.1, 0.9, UnitSystem::Natural).unwrap();
        let w = effective_frequency(&p, &o).unwrap();
        for k in [0.5, 2.0] {
            let pk = RabiParams::new(0.3 * k, 0.7 * k, 1.1 * k, 0.2 * k).unwrap();
            let ok = ThermalOscillator::from_temperature(1.1 * k, 0.9 * k, UnitSystem::Natural).unwrap();
            assert_relative_eq!(effective_frequency(&pk, &ok).unwrap(), k * w, max_relative = 1e-14);
        }
    }
}
