//! Laplace-space solution of the truncated equations of motion.
//!
//! Eliminating ρ10, ρ01 and ρ11 = 1/s − R00 in Laplace space gives, with
//! u = s²,
//!
//! ```text
//! R00(s) = P(u) / (s Q(u))
//! P(u)   = ρ0 + Δ²/2 Σ c_n / (u + (ε − nω)²)
//! Q(u)   = 1 + Δ²/2 Σ c_n [1/(u + (ε + nω)²) + 1/(u + (ε − nω)²)]
//! ```
//!
//! Grouping equal F = (ε ± nω)² into weights W_j, the nonzero poles are
//! s = ±i√y for the roots y of `1 + Δ²/2 Σ W_j / (F_j − y) = 0`. The left
//! side increases monotonically between consecutive F_j, so there is exactly
//! one root per gap plus one above the largest F_j, and bisection finds them
//! all.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::correlation::{corr_laplace, shifted_transforms, stable_weights, CorrelationSeries};
use crate::error::{Error, Result};
use crate::model::{polaron_scalars, RabiParams, ThermalOscillator};
use crate::trajectory::{check_times, Method, QubitTrajectory};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug)]
struct Group {
    f: f64,
    w: f64,
    /// Part of `w` coming from the ε − nω family (the numerator P).
    v: f64,
}

fn groups(params: &RabiParams, series: &CorrelationSeries) -> Vec<Group> {
    let mut raw: Vec<Group> = Vec::new();
    for (n, c) in series.iter().filter(|&(_, c)| c != 0.0) {
        let nw = n as f64 * series.omega();
        let plus = params.epsilon + nw;
        let minus = params.epsilon - nw;
        raw.push(Group { f: plus * plus, w: c, v: 0.0 });
        raw.push(Group { f: minus * minus, w: c, v: c });
    }
    raw.sort_by(|a, b| a.f.total_cmp(&b.f));
    let mut out: Vec<Group> = Vec::new();
    for g in raw {
        match out.last_mut() {
            Some(last) if (g.f - last.f).abs() <= 1e-13 * g.f.max(last.f) => {
                last.w += g.w;
                last.v += g.v;
            }
            _ => out.push(g),
        }
    }
    out
}

fn secular(delta_sq: f64, gs: &[Group], y: f64) -> f64 {
    1.0 + 0.5 * delta_sq * gs.iter().map(|g| g.w / (g.f - y)).sum::<f64>()
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Squared pole frequencies y_k, one per weight group, ascending.
fn secular_roots(delta_sq: f64, gs: &[Group]) -> Vec<f64> {
    if delta_sq == 0.0 || gs.is_empty() {
        return Vec::new();
    }
    let f = |y: f64| secular(delta_sq, gs, y);
    let mut roots = Vec::with_capacity(gs.len());
    for pair in gs.windows(2) {
        roots.push(bisect(pair[0].f, pair[1].f, f));
    }
    let last = gs[gs.len() - 1].f;
    let total: f64 = gs.iter().map(|g| g.w).sum();
    let upper = last + 0.5 * delta_sq * total * 2.0 + last.abs() * 1e-12 + f64::MIN_POSITIVE;
    roots.push(bisect(last, upper, f));
    roots
}

/// Population and coherence as a finite sum over the Laplace poles.
#[derive(Clone, Debug)]
pub struct PoleExpansion {
    /// Residue of R00 at s = 0 (the long-time population).
    pub stationary: f64,
    /// Pole frequencies x_k > 0, ascending; the poles are s = ±i x_k.
    pub frequencies: Vec<f64>,
    /// Residue of R00 at ±i x_k (equal and real at both).
    pub residues: Vec<f64>,
    delta: f64,
    /// (ε + nω, c_n) and (ε − nω, c_n) for the retained harmonics.
    plus: Vec<(f64, f64)>,
    minus: Vec<(f64, f64)>,
}

/// t · (e^{iθ} − 1)/(iθ) with θ = ν t, i.e. ∫₀ᵗ e^{iντ} dτ.
fn exp_integral(nu: f64, t: f64) -> C64 {
    let th = nu * t;
    if th == 0.0 {
        return C64::new(t, 0.0);
    }
    let h = 0.5 * th;
    let s = h.sin();
    C64::new(th.sin() / th, 2.0 * s * s / th) * t
}

impl PoleExpansion {
    pub fn new(params: &RabiParams, series: &CorrelationSeries, rho0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho0) {
            return Err(Error::param("rho0", format!("must lie in [0, 1], got {rho0}")));
        }
        let d2 = params.delta * params.delta;
        let gs = groups(params, series);
        let roots = secular_roots(d2, &gs);
        if roots.iter().any(|y| !(*y > 0.0) || !y.is_finite()) {
            return Err(Error::PoleSearch(
                "secular equation produced a non-positive root".into(),
            ));
        }

        let p_at = |u: f64| rho0 + 0.5 * d2 * gs.iter().map(|g| g.v / (u + g.f)).sum::<f64>();
        let mut residues = Vec::with_capacity(roots.len());
        for &y in &roots {
            let mut slope = 0.0;
            let mut num = rho0;
            let mut degenerate = false;
            for g in &gs {
                let d = g.f - y;
                if d == 0.0 {
                    degenerate = true;
                    break;
                }
                slope += g.w / (d * d);
                num += 0.5 * d2 * g.v / d;
            }
            // A root that cannot be separated from F_j in floating point
            // belongs to a weight so small that its residue is O(W_j).
            residues.push(if degenerate { 0.0 } else { num / (y * d2 * slope) });
        }

        let stationary = if d2 == 0.0 || gs.is_empty() {
            rho0
        } else if gs[0].f == 0.0 {
            gs[0].v / gs[0].w
        } else {
            let q0 = secular(d2, &gs, 0.0);
            p_at(0.0) / q0
        };

        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (n, c) in series.iter().filter(|&(_, c)| c != 0.0) {
            let nw = n as f64 * series.omega();
            plus.push((params.epsilon + nw, c));
            minus.push((params.epsilon - nw, c));
        }
        Ok(PoleExpansion {
            stationary,
            frequencies: roots.iter().map(|y| y.sqrt()).collect(),
            residues,
            delta: params.delta,
            plus,
            minus,
        })
    }

    /// All poles of R00, sorted by imaginary part.
    pub fn poles(&self) -> Vec<C64> {
        let mut p: Vec<C64> = self.frequencies.iter().map(|&x| C64::new(0.0, -x)).collect();
        p.reverse();
        p.push(C64::new(0.0, 0.0));
        p.extend(self.frequencies.iter().map(|&x| C64::new(0.0, x)));
        p
    }

    pub fn rho00(&self, t: f64) -> f64 {
        self.stationary
            + self
                .frequencies
                .iter()
                .zip(&self.residues)
                .map(|(x, r)| 2.0 * r * (x * t).cos())
                .sum::<f64>()
    }

    /// ρ10(t) = −iΔ/2 [∫₀ᵗ K(τ) ρ00(t−τ) dτ − Σ c_n ∫₀ᵗ e^{i(ε−nω)τ} dτ] with
    /// K(τ) = Σ c_n (e^{i(ε+nω)τ} + e^{i(ε−nω)τ}).
    pub fn rho10(&self, t: f64) -> C64 {
        let mut modes: Vec<(f64, f64)> = Vec::with_capacity(2 * self.frequencies.len() + 1);
        modes.push((0.0, self.stationary));
        for (&x, &r) in self.frequencies.iter().zip(&self.residues) {
            modes.push((x, r));
            modes.push((-x, r));
        }
        let mut acc = C64::new(0.0, 0.0);
        for &(nu, c) in self.plus.iter().chain(&self.minus) {
            for &(x, r) in &modes {
                acc += C64::from_polar(r * c, x * t) * exp_integral(nu - x, t);
            }
        }
        for &(nu, c) in &self.minus {
            acc -= exp_integral(nu, t) * c;
        }
        -I * (0.5 * self.delta) * acc
    }
}

/// Poles of R00(s) for the series cut at ±`n_max`, sorted by imaginary part.
pub fn laplace_poles(params: &RabiParams, osc: &ThermalOscillator, n_max: usize) -> Result<Vec<C64>> {
    Ok(pole_expansion(params, osc, 1.0, n_max)?.poles())
}

pub fn pole_expansion(
    params: &RabiParams,
    osc: &ThermalOscillator,
    rho0: f64,
    n_max: usize,
) -> Result<PoleExpansion> {
    let s = polaron_scalars(params, osc)?;
    PoleExpansion::new(params, &stable_weights(&s, n_max), rho0)
}

/// Dynamics from the closed-form inverse Laplace transform.
pub fn pole_reconstruction_dynamics(
    params: &RabiParams,
    osc: &ThermalOscillator,
    rho0: f64,
    n_max: usize,
    times: &[f64],
) -> Result<QubitTrajectory> {
    check_times(times)?;
    let e = pole_expansion(params, osc, rho0, n_max)?;
    Ok(QubitTrajectory {
        times: times.to_vec(),
        rho00: times.iter().map(|&t| e.rho00(t)).collect(),
        rho10: times.iter().map(|&t| e.rho10(t)).collect(),
        method: Method::PoleReconstruction,
    })
}

/// R00(s) and R10(s) evaluated directly from the four shifted transforms
/// C'(s ± iε), C''(s ± iε).
pub fn laplace_populations(
    series: &CorrelationSeries,
    params: &RabiParams,
    rho0: f64,
    s: C64,
) -> Result<(C64, C64)> {
    let t = shifted_transforms(series, s, params.epsilon)?;
    let q = 0.25 * params.delta * params.delta;
    let r00 = (rho0 + q * (t.c2_minus + t.c1_plus) / s) / (s + q * t.sum());
    let r11 = 1.0 / s - r00;
    let r10 = -I * (0.5 * params.delta) * (t.c1_minus * r00 - t.c2_minus * r11);
    Ok((r00, r10))
}

/// (1/2πi) ∮ f over a circle, trapezoidal rule on `nodes` points.
pub fn residue_by_contour<F>(f: F, center: C64, radius: f64, nodes: usize) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let z = C64::from_polar(radius, TAU * k as f64 / nodes as f64);
        acc += f(center + z)? * z;
    }
    Ok(acc / nodes as f64)
}

/// C(τ) rebuilt from contour residues of C'(s) at s = inω.
pub fn corr_from_laplace(series: &CorrelationSeries, tau: f64, nodes: usize) -> Result<C64> {
    let w = series.omega();
    let mut acc = C64::new(0.0, 0.0);
    for (n, c) in series.iter() {
        if c == 0.0 {
            continue;
        }
        let pole = C64::new(0.0, n as f64 * w);
        let r = residue_by_contour(|s| corr_laplace(series, s), pole, 0.25 * w, nodes)?;
        acc += r * (pole * tau).exp();
    }
    Ok(acc)
}
