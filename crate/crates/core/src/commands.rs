//! The four command-line operations, writing CSV and JSON artifacts.
//!
//! Every number goes through [`fmt_num`] (17 significant digits) so that a
//! given configuration always produces byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::RunConfig;
use crate::correlation::stable_weights;
use crate::dynamics::{
    pole_reconstruction_dynamics, series_dynamics, single_term_dynamics, spectrum, Spectrum,
    SingleTermSolution,
};
use crate::dynamics::spectrum::amplitude_spectrum;
use crate::error::{Error, Result};
use crate::exact::{evolve_exact, FockTruncation, QubitInit};
use crate::model::{polaron_scalars, single_term_validity};
use crate::thermometry::{sensitivity_curve, sweep, thermometry_roundtrip, RoundtripConfig};
use crate::trajectory::{uniform_step, Method, QubitTrajectory};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const WEIGHTS_FILE: &str = "weights.csv";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SENSITIVITY_FILE: &str = "sensitivity.csv";
pub const NPOINTS_FILE: &str = "npoints.csv";

const ORDER: [Method; 4] = [
    Method::Exact,
    Method::SingleTerm,
    Method::Series,
    Method::PoleReconstruction,
];

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<PathBuf> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    write_atomic(path, &csv_bytes(&header, rows)?)?;
    Ok(path.to_path_buf())
}

fn ordered(methods: &[Method]) -> Vec<Method> {
    ORDER.iter().copied().filter(|m| methods.contains(m)).collect()
}

/// Runs the configured solvers on the shared time grid, in a fixed order.
pub fn run_solvers(cfg: &RunConfig) -> Result<Vec<QubitTrajectory>> {
    let osc = cfg.oscillator()?;
    let times = cfg.time_grid()?;
    let p = &cfg.params;
    ordered(&cfg.methods)
        .into_iter()
        .map(|m| match m {
            Method::Exact => {
                let trunc = match cfg.truncation {
                    Some(d) => FockTruncation::new(d)?,
                    None => FockTruncation::auto(p, &osc),
                };
                evolve_exact(p, QubitInit::population(cfg.rho0), &osc, trunc, &times)
            }
            Method::SingleTerm => single_term_dynamics(p, &osc, cfg.rho0, &times),
            Method::Series => series_dynamics(p, &osc, cfg.rho0, cfg.n_max, &times, cfg.step),
            Method::PoleReconstruction => {
                pole_reconstruction_dynamics(p, &osc, cfg.rho0, cfg.n_max, &times)
            }
        })
        .collect()
}

fn trajectory_csv(path: &Path, trajs: &[QubitTrajectory]) -> Result<PathBuf> {
    let mut header = vec!["t".to_string()];
    header.extend(trajs.iter().map(|t| format!("rho00_{}", t.method)));
    header.extend(trajs.iter().map(|t| format!("abs_rho10_{}", t.method)));
    let n = trajs.first().map_or(0, |t| t.len());
    let rows = (0..n).map(|i| {
        let mut r = vec![fmt_num(trajs[0].times[i])];
        r.extend(trajs.iter().map(|t| fmt_num(t.rho00[i])));
        r.extend(trajs.iter().map(|t| fmt_num(t.rho10[i].norm())));
        r
    });
    write_atomic(path, &csv_bytes(&header, rows)?)?;
    Ok(path.to_path_buf())
}

/// Derived scalars and run settings as JSON.
pub fn metadata(cfg: &RunConfig) -> Result<serde_json::Value> {
    let osc = cfg.oscillator()?;
    let s = polaron_scalars(&cfg.params, &osc)?;
    let v = single_term_validity(&s);
    let sol = SingleTermSolution::new(&cfg.params, &osc, cfg.rho0)?;
    let times = cfg.time_grid()?;
    let dim = cfg
        .truncation
        .unwrap_or_else(|| FockTruncation::auto(&cfg.params, &osc).dim());
    Ok(json!({
        "version": env!("CARGO_PKG_VERSION"),
        "units": cfg.units,
        "frequency": cfg.frequency,
        "model": {
            "epsilon": cfg.params.epsilon,
            "delta": cfg.params.delta,
            "omega": cfg.params.omega,
            "g": cfg.params.g,
        },
        "temperature": osc.temperature,
        "rho0": cfg.rho0,
        "derived": {
            "alpha": s.alpha,
            "beta_omega": s.beta_omega,
            "occupation": s.occupation,
            "b": s.b,
            "z": s.z,
            "absorption": s.absorption,
            "emission": s.emission,
            "rabi_frequency": cfg.params.rabi_frequency(),
            "effective_frequency": sol.omega_eff,
            "reduction": sol.reduction,
        },
        "validity": { "z": v.z, "threshold": v.threshold, "valid": v.valid },
        "solvers": ordered(&cfg.methods).iter().map(|m| m.tag()).collect::<Vec<_>>(),
        "n_max": cfg.n_max,
        "truncation_dim": dim,
        "n_samples": times.len(),
        "t_end": times.last().copied().unwrap_or(0.0),
    }))
}

/// `weights.csv` with columns n, c_n for n ∈ [−n_max, n_max].
pub fn cmd_weights(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let s = polaron_scalars(&cfg.params, &cfg.oscillator()?)?;
    let series = stable_weights(&s, cfg.n_max);
    let rows = series.iter().map(|(n, c)| vec![n.to_string(), fmt_num(c)]);
    Ok(vec![write_csv(&out.join(WEIGHTS_FILE), &["n", "c_n"], rows)?])
}

/// Trajectory CSV, metadata JSON and the weight table.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let trajs = run_solvers(cfg)?;
    let mut files = vec![trajectory_csv(&out.join(TRAJECTORY_FILE), &trajs)?];
    let meta = serde_json::to_string_pretty(&metadata(cfg)?)
        .map_err(|e| Error::Consistency(e.to_string()))?;
    let path = out.join(METADATA_FILE);
    write_atomic(&path, format!("{meta}\n").as_bytes())?;
    files.push(path);
    files.extend(cmd_weights(cfg, out)?);
    Ok(files)
}

fn spectrum_csv(path: &Path, spectra: &[(String, Spectrum)]) -> Result<PathBuf> {
    let rows = spectra.iter().flat_map(|(tag, s)| {
        s.frequencies
            .iter()
            .zip(&s.amplitudes)
            .map(move |(w, a)| vec![fmt_num(*w), fmt_num(*a), tag.clone()])
    });
    write_csv(path, &["angular_frequency", "amplitude", "solver"], rows)
}

/// Reads a trajectory CSV and returns its time column and every
/// `rho00_<tag>` column.
pub fn read_trajectory_csv(path: &Path) -> Result<(Vec<f64>, Vec<(String, Vec<f64>)>)> {
    let text = fs::read_to_string(path)?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |m: String| Error::Config(format!("{}: {m}", path.display()));
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let t_col = headers
        .iter()
        .position(|h| h.trim() == "t")
        .ok_or_else(|| bad("no `t` column".into()))?;
    let cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.trim().strip_prefix("rho00_").map(|tag| (i, tag.to_string())))
        .collect();
    if cols.is_empty() {
        return Err(bad("no `rho00_*` columns".into()));
    }
    let mut times = Vec::new();
    let mut series: Vec<(String, Vec<f64>)> = cols.iter().map(|(_, t)| (t.clone(), Vec::new())).collect();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad(format!("unparsable value on data row {}", line + 1)))
        };
        times.push(num(t_col)?);
        for (k, (i, _)) in cols.iter().enumerate() {
            series[k].1.push(num(*i)?);
        }
    }
    Ok((times, series))
}

/// Spectra of ρ00 for each solver, from either an existing trajectory CSV
/// or a fresh simulation.
pub fn cmd_spectrum(cfg: Option<&RunConfig>, input: Option<&Path>, out: &Path) -> Result<Vec<PathBuf>> {
    let spectra: Vec<(String, Spectrum)> = match (input, cfg) {
        (Some(path), _) => {
            let (times, cols) = read_trajectory_csv(path)?;
            let dt = uniform_step(&times)?;
            cols.into_iter()
                .map(|(tag, v)| Ok((tag, amplitude_spectrum(&v, dt)?)))
                .collect::<Result<_>>()?
        }
        (None, Some(cfg)) => run_solvers(cfg)?
            .iter()
            .map(|t| Ok((t.method.tag().to_string(), spectrum(t)?)))
            .collect::<Result<_>>()?,
        (None, None) => return Err(Error::Config("spectrum needs --config or --input".into())),
    };
    Ok(vec![spectrum_csv(&out.join(SPECTRUM_FILE), &spectra)?])
}

fn mk(t: f64) -> String {
    fmt_num(t * 1e3)
}

/// Temperature sweep, sensitivity curve and, if configured, the error versus
/// number of fitted points.
pub fn cmd_thermometry(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let grid = cfg
        .temperature
        .as_ref()
        .ok_or_else(|| Error::Config("missing `[temperature]` section".into()))?
        .values();
    let th = &cfg.thermometry;
    let results = sweep(&cfg.params, &grid, th)?;
    let rows = results.iter().map(|r| {
        vec![
            mk(r.t_in),
            fmt_num(r.omega_fit),
            mk(r.t_out),
            mk(r.abs_error),
            fmt_num(r.domega_dt),
            mk(r.t_uncertainty_from_df),
        ]
    });
    let mut files = vec![write_csv(
        &out.join(SWEEP_FILE),
        &["T_in_mK", "omega_fit_rad_s", "T_out_mK", "abs_err_mK", "dOmega_dT", "T_err_from_10kHz"],
        rows,
    )?];

    let (lo, hi) = th.bracket;
    let m = cfg.sensitivity_points;
    let t_grid: Vec<f64> = (0..m).map(|k| lo + (hi - lo) * k as f64 / (m - 1) as f64).collect();
    let curve = sensitivity_curve(&cfg.params, cfg.units, &t_grid)?;
    let rows = curve
        .iter()
        .map(|c| vec![mk(c.t), fmt_num(c.omega), fmt_num(c.domega_dt)]);
    files.push(write_csv(
        &out.join(SENSITIVITY_FILE),
        &["T_mK", "omega_rad_s", "dOmega_dT"],
        rows,
    )?);

    if !cfg.n_points_scan.is_empty() {
        let t_in = cfg.scan_temperature.unwrap_or(grid[grid.len() / 2]);
        let rows = cfg
            .n_points_scan
            .iter()
            .map(|&n| {
                let c = RoundtripConfig { n_points: n, ..*th };
                let r = thermometry_roundtrip(&cfg.params, t_in, &c).map_err(|e| {
                    Error::AtTemperature {
                        temperature: t_in,
                        source: Box::new(e),
                    }
                })?;
                Ok(vec![n.to_string(), mk(t_in), mk(r.t_out), mk(r.abs_error)])
            })
            .collect::<Result<Vec<_>>>()?;
        files.push(write_csv(
            &out.join(NPOINTS_FILE),
            &["n_points", "T_in_mK", "T_out_mK", "abs_err_mK"],
            rows,
        )?);
    }
    Ok(files)
}
