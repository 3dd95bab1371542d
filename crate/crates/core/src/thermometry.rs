//! Oscillator thermometry: fit the qubit's oscillation frequency and invert
//! the temperature dependence of the single-term effective frequency.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::single_term::effective_frequency;
use crate::dynamics::spectrum::amplitude_spectrum;
use crate::error::{Error, Result};
use crate::exact::{evolve_exact, FockTruncation, QubitInit};
use crate::model::{RabiParams, ThermalOscillator, UnitSystem};
use crate::trajectory::{uniform_grid, uniform_step};

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "RABI_THERMO_THREADS";
/// A 10 kHz frequency uncertainty expressed as an angular frequency.
pub const DEFAULT_FREQUENCY_ERROR: f64 = TAU * 1e4;
pub const DEFAULT_BRACKET: (f64, f64) = (0.005, 0.150);

const MONOTONE_GRID: usize = 64;
const MIN_FIT_POINTS: usize = 8;
const GOLDEN_TOL: f64 = 1e-13;

/// Least-squares fit of `offset + amplitude·cos(omega_fit·t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencyFit {
    pub omega_fit: f64,
    pub offset: f64,
    pub amplitude: f64,
    pub residual_rms: f64,
    pub n_points: usize,
    pub dt: f64,
    /// The signal carried no oscillation; `omega_fit` is then meaningless.
    pub degenerate: bool,
}

struct Linear {
    offset: f64,
    amplitude: f64,
    ss: f64,
}

fn linear_fit(times: &[f64], values: &[f64], omega: f64) -> Linear {
    let n = times.len() as f64;
    let (mut sc, mut scc, mut sy, mut syc) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in times.iter().zip(values) {
        let c = (omega * t).cos();
        sc += c;
        scc += c * c;
        sy += y;
        syc += y * c;
    }
    let det = n * scc - sc * sc;
    let (offset, amplitude) = if det > 1e-12 * n * n {
        ((scc * sy - sc * syc) / det, (n * syc - sc * sy) / det)
    } else {
        (sy / n, 0.0)
    };
    let ss = times
        .iter()
        .zip(values)
        .map(|(&t, &y)| {
            let r = y - offset - amplitude * (omega * t).cos();
            r * r
        })
        .sum();
    Linear { offset, amplitude, ss }
}

fn golden_section(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > GOLDEN_TOL * b.abs().max(a.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Separable least-squares frequency fit over `bracket = (Ω_lo, Ω_hi)`.
///
/// Offset and amplitude are solved in closed form for each trial Ω; Ω itself
/// is scanned on a grid of a quarter DFT bin and refined by golden section.
/// The samples must cover at least a quarter period at Ω_hi.
pub fn fit_frequency(times: &[f64], values: &[f64], bracket: (f64, f64)) -> Result<FrequencyFit> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::param("bracket", format!("need 0 < lo < hi, got [{lo:e}, {hi:e}]")));
    }
    if times.len() != values.len() {
        return Err(Error::param("values", "length differs from times"));
    }
    let n = times.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{n} samples, need at least {MIN_FIT_POINTS}"
        )));
    }
    let dt = uniform_step(times)?;
    let span = times[n - 1] - times[0];
    if span * hi < 0.5 * PI {
        return Err(Error::InsufficientData(format!(
            "samples span {span:e} s, under a quarter period at the top of the bracket"
        )));
    }

    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if var.sqrt() <= 1e-12 * scale {
        return Ok(FrequencyFit {
            omega_fit: 0.5 * (lo + hi),
            offset: mean,
            amplitude: 0.0,
            residual_rms: var.sqrt(),
            n_points: n,
            dt,
            degenerate: true,
        });
    }

    let ss = |w: f64| linear_fit(times, values, w).ss;
    let step = 0.25 * TAU / (n as f64 * dt);
    let m = (((hi - lo) / step).ceil() as usize).max(16);
    let grid: Vec<f64> = (0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64).collect();
    let scores: Vec<f64> = grid.iter().map(|&w| ss(w)).collect();
    let best = (0..=m).min_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap();
    if best == 0 || best == m {
        return Err(Error::Bracket { lo, hi });
    }
    let omega = golden_section(grid[best - 1], grid[best + 1], ss);
    let lin = linear_fit(times, values, omega);
    Ok(FrequencyFit {
        omega_fit: omega,
        offset: lin.offset,
        amplitude: lin.amplitude,
        residual_rms: (lin.ss / n as f64).sqrt(),
        n_points: n,
        dt,
        degenerate: false,
    })
}

/// Frequency of the largest DFT line, refined by a parabola through the log
/// amplitudes of the three bins around it.
pub fn fit_frequency_dft(times: &[f64], values: &[f64]) -> Result<f64> {
    let dt = uniform_step(times)?;
    let s = amplitude_spectrum(values, dt)?;
    let p = s
        .dominant_peak()
        .ok_or_else(|| Error::InsufficientData("no spectral line".into()))?;
    let k = p.index;
    if k + 1 >= s.amplitudes.len() {
        return Ok(p.frequency);
    }
    let (a, b, c) = (
        s.amplitudes[k - 1].ln(),
        s.amplitudes[k].ln(),
        s.amplitudes[k + 1].ln(),
    );
    let denom = a - 2.0 * b + c;
    let shift = if denom.is_finite() && denom != 0.0 {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Ok((k as f64 + shift) * s.bin_width())
}

fn omega_at(params: &RabiParams, units: UnitSystem, t: f64) -> Result<f64> {
    effective_frequency(params, &ThermalOscillator::from_temperature(params.omega, t, units)?)
}

fn check_bracket(bracket: (f64, f64)) -> Result<()> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::param(
            "bracket",
            format!("need 0 < T_lo < T_hi, got [{lo:e}, {hi:e}]"),
        ));
    }
    Ok(())
}

/// Temperature at which the effective frequency equals `omega_meas`.
///
/// Ω(T) must fall strictly on a 64-point grid across the bracket; a flat
/// stretch (weak coupling or too low a T_lo) is reported as a plateau.
pub fn invert_temperature(
    omega_meas: f64,
    params: &RabiParams,
    units: UnitSystem,
    bracket: (f64, f64),
) -> Result<f64> {
    check_bracket(bracket)?;
    params.validate()?;
    let (t_lo, t_hi) = bracket;
    let grid: Vec<f64> = (0..MONOTONE_GRID)
        .map(|k| t_lo + (t_hi - t_lo) * k as f64 / (MONOTONE_GRID - 1) as f64)
        .collect();
    let omegas = grid
        .iter()
        .map(|&t| omega_at(params, units, t))
        .collect::<Result<Vec<_>>>()?;
    for (k, w) in omegas.windows(2).enumerate() {
        if !(w[0] - w[1] > 64.0 * f64::EPSILON * w[0]) {
            return Err(Error::Plateau {
                t_lo: grid[k],
                t_hi: grid[k + 1],
            });
        }
    }
    let (w_hi, w_lo) = (omegas[0], omegas[MONOTONE_GRID - 1]);
    if !(omega_meas >= w_lo && omega_meas <= w_hi) {
        return Err(Error::OutOfRange {
            omega: omega_meas,
            lo: w_lo,
            hi: w_hi,
        });
    }
    let k = omegas.partition_point(|&w| w > omega_meas).clamp(1, MONOTONE_GRID - 1);
    let (mut a, mut b) = (grid[k - 1], grid[k]);
    while b - a > 1e-13 * b {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if omega_at(params, units, mid)? > omega_meas {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// dΩ/dT by a centered difference with step 1e-4·T.
pub fn frequency_slope(params: &RabiParams, units: UnitSystem, t: f64) -> Result<f64> {
    let h = 1e-4 * t;
    Ok((omega_at(params, units, t + h)? - omega_at(params, units, t - h)?) / (2.0 * h))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SensitivityPoint {
    pub t: f64,
    pub omega: f64,
    pub domega_dt: f64,
}

/// Ω(T) and dΩ/dT on an ascending positive grid.
pub fn sensitivity_curve(
    params: &RabiParams,
    units: UnitSystem,
    t_grid: &[f64],
) -> Result<Vec<SensitivityPoint>> {
    if t_grid.iter().any(|t| !(*t > 0.0)) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("t_grid", "must be positive and strictly ascending"));
    }
    t_grid
        .iter()
        .map(|&t| {
            Ok(SensitivityPoint {
                t,
                omega: omega_at(params, units, t)?,
                domega_dt: frequency_slope(params, units, t)?,
            })
        })
        .collect()
}

/// Settings shared by every round trip of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoundtripConfig {
    pub n_points: usize,
    pub dt: f64,
    pub bracket: (f64, f64),
    pub frequency_error: f64,
    pub units: UnitSystem,
    /// Oscillator dimension; chosen from the temperature when `None`.
    pub truncation: Option<usize>,
    /// Fit bracket; defaults to [0.8 Ω(T_hi), 1.2 Ωr].
    pub fit_bracket: Option<(f64, f64)>,
}

impl Default for RoundtripConfig {
    fn default() -> Self {
        RoundtripConfig {
            n_points: 200,
            dt: 1e-9,
            bracket: DEFAULT_BRACKET,
            frequency_error: DEFAULT_FREQUENCY_ERROR,
            units: UnitSystem::Physical,
            truncation: None,
            fit_bracket: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermometryResult {
    pub t_in: f64,
    pub omega_fit: f64,
    pub t_out: f64,
    pub abs_error: f64,
    pub domega_dt: f64,
    /// |δΩ / (dΩ/dT)| for the configured frequency error δΩ.
    pub t_uncertainty_from_df: f64,
    /// |T(Ω_fit + δΩ) − T_out| from a second inversion, when it stays in range.
    pub t_shift_from_df: Option<f64>,
    pub fit: FrequencyFit,
}

/// Simulate exactly at `t_in`, fit the frequency and infer the temperature.
pub fn thermometry_roundtrip(
    params: &RabiParams,
    t_in: f64,
    cfg: &RoundtripConfig,
) -> Result<ThermometryResult> {
    check_bracket(cfg.bracket)?;
    let osc = ThermalOscillator::from_temperature(params.omega, t_in, cfg.units)?;
    let trunc = match cfg.truncation {
        Some(d) => FockTruncation::new(d)?,
        None => FockTruncation::auto(params, &osc),
    };
    let times = uniform_grid(cfg.n_points, cfg.dt);
    let traj = evolve_exact(params, QubitInit::population(1.0), &osc, trunc, &times)?;
    let fit_bracket = match cfg.fit_bracket {
        Some(b) => b,
        None => (
            0.8 * omega_at(params, cfg.units, cfg.bracket.1)?,
            1.2 * params.rabi_frequency(),
        ),
    };
    let fit = fit_frequency(&traj.times, &traj.rho00, fit_bracket)?;
    let t_out = invert_temperature(fit.omega_fit, params, cfg.units, cfg.bracket)?;
    let slope = frequency_slope(params, cfg.units, t_out)?;
    let shifted = invert_temperature(fit.omega_fit + cfg.frequency_error, params, cfg.units, cfg.bracket)
        .ok()
        .map(|t| (t - t_out).abs());
    Ok(ThermometryResult {
        t_in,
        omega_fit: fit.omega_fit,
        t_out,
        abs_error: (t_out - t_in).abs(),
        domega_dt: slope,
        t_uncertainty_from_df: (cfg.frequency_error / slope).abs(),
        t_shift_from_df: shifted,
        fit,
    })
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
}

/// Round trips over a temperature grid, in parallel, merged in grid order.
/// The first failure is returned with its temperature attached.
pub fn sweep(
    params: &RabiParams,
    temperatures: &[f64],
    cfg: &RoundtripConfig,
) -> Result<Vec<ThermometryResult>> {
    let run = || {
        temperatures
            .par_iter()
            .map(|&t| {
                thermometry_roundtrip(params, t, cfg).map_err(|e| Error::AtTemperature {
                    temperature: t,
                    source: Box::new(e),
                })
            })
            .collect::<Vec<_>>()
    };
    let results = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("{THREADS_ENV}: {e}")))?
            .install(run),
        None => run(),
    };
    results.into_iter().collect()
}
