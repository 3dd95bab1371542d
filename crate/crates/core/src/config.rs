//! Run configuration read from TOML.
//!
//! ```toml
//! units = "physical"        # or "natural" (ħ = k_B = 1)
//! frequency = "angular"     # or "ordinary": model values in Hz, scaled by 2π
//! rho0 = 1.0                # initial excited-state population
//!
//! [model]
//! epsilon = 1e8
//! delta = 1e8
//! omega = 1e9
//! g = 1e8
//!
//! [temperature]             # exactly one of: value | grid | start/stop/step
//! value = 0.010
//!
//! [solver]
//! methods = ["exact", "single", "series"]
//! n_max = 10
//!
//! [time]                    # t_end + n_samples, or dt + n_samples
//! t_end = 2e-6
//! n_samples = 2001
//!
//! [truncation]
//! dim = 80
//!
//! [thermometry]
//! t_lo = 0.005
//! t_hi = 0.150
//! n_points = 200
//! dt = 1e-9
//! frequency_error = 62831.853
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::correlation::DEFAULT_N_MAX;
use crate::dynamics::single_term::effective_frequency;
use crate::error::{Error, Result};
use crate::model::{RabiParams, ThermalOscillator, UnitSystem};
use crate::thermometry::RoundtripConfig;
use crate::trajectory::{uniform_grid, Method};

/// Samples per single-term period, and periods covered, when `[time]` is
/// omitted.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 32;
pub const DEFAULT_PERIODS: usize = 64;
const DEFAULT_SENSITIVITY_POINTS: usize = 146;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    units: UnitSystem,
    #[serde(default)]
    frequency: FrequencyConvention,
    rho0: Option<f64>,
    seed: Option<u64>,
    model: RawModel,
    temperature: Option<RawTemperature>,
    #[serde(default)]
    solver: RawSolver,
    time: Option<RawTime>,
    truncation: Option<RawTruncation>,
    thermometry: Option<RawThermometry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    epsilon: f64,
    delta: f64,
    omega: f64,
    g: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemperature {
    value: Option<f64>,
    grid: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    methods: Option<Vec<String>>,
    n_max: Option<usize>,
    step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_end: Option<f64>,
    dt: Option<f64>,
    n_samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncation {
    dim: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermometry {
    t_lo: Option<f64>,
    t_hi: Option<f64>,
    n_points: Option<usize>,
    dt: Option<f64>,
    frequency_error: Option<f64>,
    fit_lo: Option<f64>,
    fit_hi: Option<f64>,
    sensitivity_points: Option<usize>,
    n_points_scan: Option<Vec<usize>>,
    scan_temperature: Option<f64>,
}

/// How the `[model]` frequencies are read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyConvention {
    /// Values are angular frequencies (rad/s) and used as given.
    #[default]
    Angular,
    /// Values are ordinary frequencies (Hz) and multiplied by 2π.
    Ordinary,
}

impl FrequencyConvention {
    pub fn factor(self) -> f64 {
        match self {
            FrequencyConvention::Angular => 1.0,
            FrequencyConvention::Ordinary => std::f64::consts::TAU,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Temperature {
    Single(f64),
    Grid(Vec<f64>),
}

impl Temperature {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Temperature::Single(t) => vec![*t],
            Temperature::Grid(g) => g.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TimeSpec {
    /// `n_samples` points on [0, t_end].
    Span { t_end: f64, n_samples: usize },
    Step { dt: f64, n_samples: usize },
    /// Derived from the single-term frequency at run time.
    Auto,
}

/// Validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub units: UnitSystem,
    pub frequency: FrequencyConvention,
    pub params: RabiParams,
    pub temperature: Option<Temperature>,
    pub rho0: f64,
    /// Reserved; every computation is deterministic.
    pub seed: Option<u64>,
    pub methods: Vec<Method>,
    pub n_max: usize,
    pub step: Option<f64>,
    pub time: TimeSpec,
    pub truncation: Option<usize>,
    pub thermometry: RoundtripConfig,
    pub sensitivity_points: usize,
    pub n_points_scan: Vec<usize>,
    pub scan_temperature: Option<f64>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(cfg_err(format!("`{name}` must be positive and finite, got {v}")))
    }
}

/// Parses a solver list such as `"exact,single"`.
pub fn parse_methods<S: AsRef<str>>(items: &[S]) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for s in items {
        let s = s.as_ref().trim();
        if s.is_empty() {
            continue;
        }
        let m = Method::parse(s).ok_or_else(|| cfg_err(format!("unknown solver `{s}`")))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(cfg_err("`solver.methods` is empty"));
    }
    Ok(out)
}

fn temperature(raw: RawTemperature) -> Result<Temperature> {
    let range = match (raw.start, raw.stop, raw.step) {
        (None, None, None) => None,
        (Some(a), Some(b), Some(h)) => Some((a, b, h)),
        _ => return Err(cfg_err("`temperature` range needs all of start, stop and step")),
    };
    let given = raw.value.is_some() as u8 + raw.grid.is_some() as u8 + range.is_some() as u8;
    if given != 1 {
        return Err(cfg_err(
            "`temperature` needs exactly one of value, grid or start/stop/step",
        ));
    }
    let check = |t: f64| {
        if t >= 0.0 && t.is_finite() {
            Ok(t)
        } else {
            Err(cfg_err(format!("temperature must be non-negative, got {t}")))
        }
    };
    if let Some(t) = raw.value {
        return Ok(Temperature::Single(check(t)?));
    }
    let grid = match (raw.grid, range) {
        (Some(g), _) => g,
        (None, Some((a, b, h))) => {
            positive("temperature.step", h)?;
            if b < a {
                return Err(cfg_err("`temperature.stop` is below `start`"));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize + 1;
            (0..n).map(|k| a + k as f64 * h).collect()
        }
        _ => unreachable!(),
    };
    if grid.is_empty() {
        return Err(cfg_err("`temperature.grid` is empty"));
    }
    for t in &grid {
        check(*t)?;
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(cfg_err("`temperature.grid` must be strictly ascending"));
    }
    Ok(Temperature::Grid(grid))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        let m = raw.model;
        let k = raw.frequency.factor();
        let params = RabiParams::new(k * m.epsilon, k * m.delta, k * m.omega, k * m.g)
            .map_err(|e| cfg_err(format!("[model] {e}")))?;
        let rho0 = raw.rho0.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&rho0) {
            return Err(cfg_err(format!("`rho0` must lie in [0, 1], got {rho0}")));
        }
        let temperature = raw.temperature.map(temperature).transpose()?;
        let methods = match &raw.solver.methods {
            Some(list) => parse_methods(list)?,
            None => vec![Method::Exact, Method::SingleTerm, Method::Series],
        };
        let step = raw.solver.step.map(|h| positive("solver.step", h)).transpose()?;
        let time = match raw.time {
            None => TimeSpec::Auto,
            Some(t) => {
                if t.n_samples < 2 {
                    return Err(cfg_err("`time.n_samples` must be at least 2"));
                }
                match (t.t_end, t.dt) {
                    (Some(e), None) => TimeSpec::Span {
                        t_end: positive("time.t_end", e)?,
                        n_samples: t.n_samples,
                    },
                    (None, Some(d)) => TimeSpec::Step {
                        dt: positive("time.dt", d)?,
                        n_samples: t.n_samples,
                    },
                    _ => return Err(cfg_err("`time` needs exactly one of t_end or dt")),
                }
            }
        };
        let truncation = match raw.truncation {
            Some(t) if t.dim < 2 => return Err(cfg_err("`truncation.dim` must be at least 2")),
            Some(t) => Some(t.dim),
            None => None,
        };
        let th = raw.thermometry.unwrap_or_default();
        let defaults = RoundtripConfig::default();
        let bracket = (
            positive("thermometry.t_lo", th.t_lo.unwrap_or(defaults.bracket.0))?,
            positive("thermometry.t_hi", th.t_hi.unwrap_or(defaults.bracket.1))?,
        );
        if bracket.1 <= bracket.0 {
            return Err(cfg_err("`thermometry.t_hi` must exceed `t_lo`"));
        }
        let fit_bracket = match (th.fit_lo, th.fit_hi) {
            (None, None) => None,
            (Some(a), Some(b)) if b > a => Some((positive("thermometry.fit_lo", a)?, b)),
            _ => return Err(cfg_err("`thermometry.fit_lo/fit_hi` must be given together, lo < hi")),
        };
        let thermometry = RoundtripConfig {
            n_points: th.n_points.unwrap_or(defaults.n_points),
            dt: positive("thermometry.dt", th.dt.unwrap_or(defaults.dt))?,
            bracket,
            frequency_error: th.frequency_error.unwrap_or(defaults.frequency_error),
            units: raw.units,
            truncation,
            fit_bracket,
        };
        Ok(RunConfig {
            units: raw.units,
            frequency: raw.frequency,
            params,
            temperature,
            rho0,
            seed: raw.seed,
            methods,
            n_max: raw.solver.n_max.unwrap_or(DEFAULT_N_MAX),
            step,
            time,
            truncation,
            thermometry,
            sensitivity_points: th.sensitivity_points.unwrap_or(DEFAULT_SENSITIVITY_POINTS).max(2),
            n_points_scan: th.n_points_scan.unwrap_or_default(),
            scan_temperature: th.scan_temperature,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// The single temperature of a simulation run.
    pub fn single_temperature(&self) -> Result<f64> {
        match &self.temperature {
            Some(Temperature::Single(t)) => Ok(*t),
            Some(Temperature::Grid(g)) if g.len() == 1 => Ok(g[0]),
            Some(Temperature::Grid(_)) => {
                Err(cfg_err("this command needs a single `temperature.value`"))
            }
            None => Err(cfg_err("missing `[temperature]` section")),
        }
    }

    pub fn oscillator(&self) -> Result<ThermalOscillator> {
        ThermalOscillator::from_temperature(self.params.omega, self.single_temperature()?, self.units)
    }

    pub fn time_grid(&self) -> Result<Vec<f64>> {
        Ok(match self.time {
            TimeSpec::Span { t_end, n_samples } => {
                uniform_grid(n_samples, t_end / (n_samples - 1) as f64)
            }
            TimeSpec::Step { dt, n_samples } => uniform_grid(n_samples, dt),
            TimeSpec::Auto => {
                let w = effective_frequency(&self.params, &self.oscillator()?)?;
                if !(w > 0.0) {
                    return Err(cfg_err("cannot derive a time grid without tunnelling or bias; set [time]"));
                }
                let dt = std::f64::consts::TAU / w / DEFAULT_SAMPLES_PER_PERIOD as f64;
                uniform_grid(DEFAULT_PERIODS * DEFAULT_SAMPLES_PER_PERIOD, dt)
            }
        })
    }
}
