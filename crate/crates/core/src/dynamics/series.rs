//! Time-domain solver for the Born-approximated equations of motion with the
//! correlation function cut to a finite harmonic sum.
//!
//! With C(τ) = Σ c_n e^{inωτ} every memory integral is a sum of exponentially
//! weighted integrals of the populations, and each of those obeys a first
//! order ODE:
//!
//! ```text
//! u_n(t) = ∫₀ᵗ e^{i(ε+nω)(t−t')} ρ00(t') dt'     u_n' = i(ε+nω) u_n + ρ00
//! v_n(t) = ∫₀ᵗ e^{i(ε−nω)(t−t')} ρ11(t') dt'     v_n' = i(ε−nω) v_n + ρ11
//! ρ10    = −i Δ/2 Σ c_n (u_n − v_n),   ρ01 = ρ10*
//! ρ00'   = −i Δ/2 (ρ10 − ρ01) = Δ Im ρ10 = −ρ11'
//! ```
//!
//! The ρ01 memory families are the complex conjugates of the ones above and
//! are not integrated separately.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::correlation::{stable_weights, CorrelationSeries};
use crate::error::{Error, Result};
use crate::model::{polaron_scalars, RabiParams, ThermalOscillator};
use crate::trajectory::{check_times, Method, QubitTrajectory};

/// Default resolution of the fastest rotating auxiliary.
pub const STEPS_PER_FASTEST_PERIOD: f64 = 1024.0;
/// Largest tolerated drift of ρ00 + ρ11 away from 1.
pub const MAX_POPULATION_LEAK: f64 = 1e-6;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Instantaneous solver state. `rho00 + rho11 = 1` is preserved by the
/// integrator since the generator conserves it linearly.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSolverState {
    pub rho00: f64,
    pub rho11: f64,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub time: f64,
}

/// Linear ODE system of size 2 + 2K for the K retained harmonics.
#[derive(Clone, Debug)]
pub struct SeriesSolver {
    delta: f64,
    weights: Vec<f64>,
    rate_u: Vec<f64>,
    rate_v: Vec<f64>,
    max_step: f64,
    fastest: f64,
}

impl SeriesSolver {
    pub fn new(params: &RabiParams, osc: &ThermalOscillator, n_max: usize) -> Result<Self> {
        let s = polaron_scalars(params, osc)?;
        Ok(Self::from_series(params, &stable_weights(&s, n_max)))
    }

    /// Solver for an arbitrary harmonic expansion of the correlation function.
    pub fn from_series(params: &RabiParams, series: &CorrelationSeries) -> Self {
        let mut weights = Vec::new();
        let mut rate_u = Vec::new();
        let mut rate_v = Vec::new();
        for (n, c) in series.iter().filter(|&(_, c)| c != 0.0) {
            let nw = n as f64 * series.omega();
            weights.push(c);
            rate_u.push(params.epsilon + nw);
            rate_v.push(params.epsilon - nw);
        }
        let wr = params.rabi_frequency();
        let mut max_step = TAU / params.omega / 40.0;
        if wr > 0.0 {
            max_step = max_step.min(TAU / wr / 40.0);
        }
        let fastest = rate_u
            .iter()
            .chain(&rate_v)
            .map(|r| r.abs())
            .fold(wr, f64::max);
        SeriesSolver {
            delta: params.delta,
            weights,
            rate_u,
            rate_v,
            max_step,
            fastest,
        }
    }

    /// Upper bound on the step: a 40th of the shorter of the oscillator and
    /// bare Rabi periods.
    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    pub fn default_step(&self) -> f64 {
        if self.fastest > 0.0 {
            self.max_step
                .min(TAU / self.fastest / STEPS_PER_FASTEST_PERIOD)
        } else {
            self.max_step
        }
    }

    pub fn initial_state(&self, rho0: f64) -> SeriesSolverState {
        let k = self.weights.len();
        SeriesSolverState {
            rho00: rho0,
            rho11: 1.0 - rho0,
            u: vec![C64::new(0.0, 0.0); k],
            v: vec![C64::new(0.0, 0.0); k],
            time: 0.0,
        }
    }

    pub fn coherence(&self, state: &SeriesSolverState) -> C64 {
        let acc: C64 = self
            .weights
            .iter()
            .zip(state.u.iter().zip(&state.v))
            .map(|(&c, (u, v))| (u - v) * c)
            .sum();
        -I * (0.5 * self.delta) * acc
    }

    fn derivative(&self, y: &[C64], dy: &mut [C64]) {
        let k = self.weights.len();
        let (rho00, rho11) = (y[0].re, y[1].re);
        let (u, v) = y[2..].split_at(k);
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..k {
            acc += (u[j] - v[j]) * self.weights[j];
        }
        let rho10 = -I * (0.5 * self.delta) * acc;
        let flow = self.delta * rho10.im;
        dy[0] = C64::new(flow, 0.0);
        dy[1] = C64::new(-flow, 0.0);
        let (du, dv) = dy[2..].split_at_mut(k);
        for j in 0..k {
            du[j] = I * self.rate_u[j] * u[j] + rho00;
            dv[j] = I * self.rate_v[j] * v[j] + rho11;
        }
    }

    /// Advances `state` to `t_end` with classical RK4 at a step no larger
    /// than `step`.
    pub fn advance(&self, state: &mut SeriesSolverState, t_end: f64, step: f64) {
        let span = t_end - state.time;
        if span <= 0.0 {
            return;
        }
        let n_steps = (span / step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = span / n_steps as f64;
        let k = self.weights.len();
        let len = 2 + 2 * k;
        let mut y = Vec::with_capacity(len);
        y.push(C64::new(state.rho00, 0.0));
        y.push(C64::new(state.rho11, 0.0));
        y.extend_from_slice(&state.u);
        y.extend_from_slice(&state.v);
        let zero = C64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4) =
            (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
        let mut tmp = vec![zero; len];
        for _ in 0..n_steps {
            self.derivative(&y, &mut k1);
            for i in 0..len {
                tmp[i] = y[i] + k1[i] * (0.5 * h);
            }
            self.derivative(&tmp, &mut k2);
            for i in 0..len {
                tmp[i] = y[i] + k2[i] * (0.5 * h);
            }
            self.derivative(&tmp, &mut k3);
            for i in 0..len {
                tmp[i] = y[i] + k3[i] * h;
            }
            self.derivative(&tmp, &mut k4);
            for i in 0..len {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        state.rho00 = y[0].re;
        state.rho11 = y[1].re;
        state.u.copy_from_slice(&y[2..2 + k]);
        state.v.copy_from_slice(&y[2 + k..]);
        state.time = t_end;
    }

    pub fn run(&self, rho0: f64, times: &[f64], step: Option<f64>) -> Result<QubitTrajectory> {
        check_times(times)?;
        if !(0.0..=1.0).contains(&rho0) {
            return Err(Error::param("rho0", format!("must lie in [0, 1], got {rho0}")));
        }
        let step = step.unwrap_or_else(|| self.default_step());
        if !(step > 0.0) || step > self.max_step * (1.0 + 1e-12) {
            return Err(Error::StepTooCoarse(format!(
                "step {step:e} exceeds the resolution bound {:e}",
                self.max_step
            )));
        }
        let mut state = self.initial_state(rho0);
        let mut rho00 = Vec::with_capacity(times.len());
        let mut rho10 = Vec::with_capacity(times.len());
        for &t in times {
            self.advance(&mut state, t, step);
            let leak = (state.rho00 + state.rho11 - 1.0).abs();
            if !(leak <= MAX_POPULATION_LEAK) {
                return Err(Error::StepTooCoarse(format!(
                    "population leaked by {leak:e} at t = {t:e}; refine the step"
                )));
            }
            rho00.push(state.rho00);
            rho10.push(self.coherence(&state));
        }
        Ok(QubitTrajectory {
            times: times.to_vec(),
            rho00,
            rho10,
            method: Method::Series,
        })
    }
}

/// Qubit dynamics with the correlation series cut at ±`n_max`.
/// `step = None` picks [`SeriesSolver::default_step`].
pub fn series_dynamics(
    params: &RabiParams,
    osc: &ThermalOscillator,
    rho0: f64,
    n_max: usize,
    times: &[f64],
    step: Option<f64>,
) -> Result<QubitTrajectory> {
    SeriesSolver::new(params, osc, n_max)?.run(rho0, times, step)
}
