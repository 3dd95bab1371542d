use std::f64::consts::TAU;

use rustfft::FftPlanner;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trajectory::{uniform_step, QubitTrajectory};

/// One-sided amplitude spectrum, `amplitudes[k] = 2|X_k|/N` at angular
/// frequency `2πk/(N dt)` for k = 0..=N/2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Peak {
    pub index: usize,
    pub frequency: f64,
    pub amplitude: f64,
}

/// Spectrum of a uniformly sampled real signal after removing its mean.
/// Rectangular window.
pub fn amplitude_spectrum(values: &[f64], dt: f64) -> Result<Spectrum> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData("spectrum needs at least two samples".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<C64> = values.iter().map(|v| C64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let df = TAU / (n as f64 * dt);
    Ok(Spectrum {
        frequencies: (0..=half).map(|k| k as f64 * df).collect(),
        amplitudes: buf[..=half].iter().map(|x| 2.0 * x.norm() / n as f64).collect(),
    })
}

/// Spectrum of ρ00(t). Fails with [`Error::NonUniformGrid`] on an irregular
/// time grid.
pub fn spectrum(traj: &QubitTrajectory) -> Result<Spectrum> {
    let dt = uniform_step(&traj.times)?;
    amplitude_spectrum(&traj.rho00, dt)
}

impl Spectrum {
    pub fn bin_width(&self) -> f64 {
        self.frequencies.get(1).copied().unwrap_or(0.0)
    }

    fn peak(&self, k: usize) -> Peak {
        Peak {
            index: k,
            frequency: self.frequencies[k],
            amplitude: self.amplitudes[k],
        }
    }

    /// Largest non-DC bin.
    pub fn dominant_peak(&self) -> Option<Peak> {
        (1..self.amplitudes.len())
            .max_by(|&a, &b| self.amplitudes[a].total_cmp(&self.amplitudes[b]))
            .map(|k| self.peak(k))
    }

    /// Local maxima above DC, largest first.
    pub fn peaks(&self) -> Vec<Peak> {
        let a = &self.amplitudes;
        let mut out: Vec<Peak> = (1..a.len())
            .filter(|&k| {
                let left = a[k - 1];
                let right = a.get(k + 1).copied().unwrap_or(f64::NEG_INFINITY);
                a[k] > 0.0 && a[k] >= left && a[k] > right
            })
            .map(|k| self.peak(k))
            .collect();
        out.sort_by(|x, y| y.amplitude.total_cmp(&x.amplitude));
        out
    }

    /// Largest local maximum more than `min_bins` away from the dominant one.
    pub fn secondary_peak(&self, min_bins: usize) -> Option<Peak> {
        let main = self.dominant_peak()?;
        self.peaks()
            .into_iter()
            .find(|p| p.index.abs_diff(main.index) > min_bins)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{uniform_grid, Method};

    fn traj(times: Vec<f64>, rho00: Vec<f64>) -> QubitTrajectory {
        let n = times.len();
        QubitTrajectory {
            times,
            rho00,
            rho10: vec![C64::new(0.0, 0.0); n],
            method: Method::Exact,
        }
    }

    #[test]
    fn cosine_peak() {
        let w = 3.7e8;
        let dt = TAU / w / 32.0;
        let times = uniform_grid(64 * 32, dt);
        let vals = times.iter().map(|t| 0.4 + (w * t).cos()).collect();
        let s = spectrum(&traj(times, vals)).unwrap();
        let p = s.dominant_peak().unwrap();
        assert_eq!(p.index, 64);
        assert!((p.frequency - w).abs() < 1e-9 * w);
        assert!((p.amplitude - 1.0).abs() < 0.02);
        assert!(s.amplitudes[0] < 1e-12);
    }

    #[test]
    fn constant_signal_is_flat() {
        let times = uniform_grid(500, 0.1);
        let s = spectrum(&traj(times, vec![0.37; 500])).unwrap();
        assert!(s.amplitudes.iter().all(|a| *a < 1e-12));
    }

    #[test]
    fn two_tones() {
        let dt = 0.05;
        let times = uniform_grid(4096, dt);
        let df = TAU / (4096.0 * dt);
        let vals = times
            .iter()
            .map(|t| (100.0 * df * t).cos() + 0.3 * (180.0 * df * t).cos())
            .collect();
        let s = spectrum(&traj(times, vals)).unwrap();
        let sec = s.secondary_peak(2).unwrap();
        assert_eq!(s.dominant_peak().unwrap().index, 100);
        assert_eq!(sec.index, 180);
        assert!((sec.amplitude - 0.3).abs() < 1e-10);
    }

    #[test]
    fn irregular_grid_rejected() {
        let t = traj(vec![0.0, 1.0, 2.5, 3.0], vec![0.0; 4]);
        assert!(matches!(spectrum(&t), Err(Error::NonUniformGrid { .. })));
    }
}
