//! The bosonic correlation function C(τ) = Tr[ρ_B D_τ(α) D_0†(α)] of a thermal
//! oscillator, its harmonic expansion and the Laplace transforms built from it.
//!
//! Three evaluators live here: the closed exponential form, the truncated
//! harmonic series and a Laguerre-polynomial series. A fourth, Fock-space
//! evaluator is [`crate::exact::corr_fock_oracle`].

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PolaronScalars;

/// Default truncation of the harmonic series.
pub const DEFAULT_N_MAX: usize = 10;

const INNER_SUM_REL_TOL: f64 = 1e-18;

/// Truncated expansion C(τ) ≈ Σ_{n=-n_max}^{n_max} c_n e^{inωτ}.
///
/// The weights are `c_n = e^{-(A+E)} I_n(z) e^{-nβω/2}`; they are stored both
/// directly and as logarithms, since for cold oscillators the positive-n
/// weights underflow long before their ratios stop being meaningful.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationSeries {
    n_max: usize,
    omega: f64,
    weights: Vec<f64>,
    ln_weights: Vec<f64>,
}

impl CorrelationSeries {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Harmonic spacing ω.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    fn index(&self, n: i64) -> Option<usize> {
        let m = self.n_max as i64;
        (-m..=m).contains(&n).then(|| (n + m) as usize)
    }

    /// c_n, or zero outside the retained range.
    pub fn weight(&self, n: i64) -> f64 {
        self.index(n).map_or(0.0, |i| self.weights[i])
    }

    /// ln c_n, or −∞ outside the retained range.
    pub fn ln_weight(&self, n: i64) -> f64 {
        self.index(n).map_or(f64::NEG_INFINITY, |i| self.ln_weights[i])
    }

    /// `(n, c_n)` pairs in ascending n.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let m = self.n_max as i64;
        (-m..=m).zip(self.weights.iter().copied())
    }

    /// Σ c_n, which tends to 1 as n_max grows.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same expansion cut at a smaller order.
    pub fn truncated(&self, n_max: usize) -> CorrelationSeries {
        let n_max = n_max.min(self.n_max);
        let lo = self.n_max - n_max;
        let hi = self.n_max + n_max + 1;
        CorrelationSeries {
            n_max,
            omega: self.omega,
            weights: self.weights[lo..hi].to_vec(),
            ln_weights: self.ln_weights[lo..hi].to_vec(),
        }
    }
}

/// Closed form C(τ) = exp(−|α|²[(1 − cos ωτ) coth(βω/2) + i sin ωτ]).
pub fn corr_closed(scalars: &PolaronScalars, tau: f64) -> C64 {
    let phase = scalars.omega * tau;
    let half = (0.5 * phase).sin();
    // b = |α|² coth(βω/2), and 1 − cos θ = 2 sin²(θ/2)
    let re = -2.0 * half * half * scalars.b;
    let im = -scalars.alpha_sq * phase.sin();
    C64::new(re, im).exp()
}

/// Series weights computed without forming I_n(z) or e^{∓nβω/2} separately.
///
/// Using A = |α|²N and E = |α|²(N+1), the weighted Bessel terms collapse to
/// `w_n = Σ_k A^{n+k} E^k / (k!(n+k)!)` for n ≥ 0, with A and E swapped for
/// negative n. The common factor Σ_k (AE)^k n!/(k!(n+k)!) is summed directly
/// and the powers of A, E are applied in the log domain.
pub fn stable_weights(scalars: &PolaronScalars, n_max: usize) -> CorrelationSeries {
    let len = 2 * n_max + 1;
    let mut ln_weights = vec![f64::NEG_INFINITY; len];
    if scalars.alpha_sq == 0.0 {
        ln_weights[n_max] = 0.0;
    } else {
        let ae = scalars.absorption * scalars.emission;
        let prefactor = -(scalars.absorption + scalars.emission);
        let mut ln_fact = 0.0;
        for n in 0..=n_max {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            let ln_sum = inner_sum(n, ae).ln();
            let common = prefactor - ln_fact + ln_sum;
            if n == 0 {
                ln_weights[n_max] = common;
            } else {
                let nf = n as f64;
                ln_weights[n_max + n] = common + nf * scalars.ln_absorption;
                ln_weights[n_max - n] = common + nf * scalars.ln_emission;
            }
        }
    }
    CorrelationSeries {
        n_max,
        omega: scalars.omega,
        weights: ln_weights.iter().map(|&l| l.exp()).collect(),
        ln_weights,
    }
}

/// Σ_k t_k with t_0 = 1, t_{k+1} = t_k · AE / ((k+1)(n+k+1)).
fn inner_sum(n: usize, ae: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0usize;
    while ae > 0.0 {
        term *= ae / ((k + 1) as f64 * (n + k + 1) as f64);
        sum += term;
        k += 1;
        if term <= INNER_SUM_REL_TOL * sum || k > 10_000 {
            break;
        }
    }
    sum
}

/// Σ_n c_n e^{inωτ}.
pub fn corr_series(series: &CorrelationSeries, tau: f64) -> C64 {
    series
        .iter()
        .filter(|&(_, c)| c != 0.0)
        .map(|(n, c)| C64::from_polar(c, n as f64 * series.omega * tau))
        .sum()
}

/// Laguerre series
/// `C(τ) = (1/Z) e^{−|α|²(1 − e^{−iωτ})} Σ_n e^{−βωn} L_n(2|α|²(1 − cos ωτ))`.
///
/// Refuses to run if `n_terms` cannot bring the geometric tail below 1e-14.
pub fn corr_laguerre_oracle(scalars: &PolaronScalars, tau: f64, n_terms: usize) -> Result<C64> {
    let bw = scalars.beta_omega;
    let needed = laguerre_terms_needed(bw);
    if n_terms < needed {
        return Err(Error::SlowConvergence {
            needed,
            given: n_terms,
        });
    }
    let phase = scalars.omega * tau;
    let half = (0.5 * phase).sin();
    let one_minus_cos = 2.0 * half * half;
    let x = 2.0 * scalars.alpha_sq * one_minus_cos;
    let ratio = (-bw).exp();

    let mut sum = 0.0;
    let mut weight = 1.0;
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..n_terms {
        // cur = L_n(x)
        sum += weight * cur;
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - x) * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
        weight *= ratio;
        if weight == 0.0 {
            break;
        }
    }
    let inv_z = if bw.is_infinite() { 1.0 } else { -(-bw).exp_m1() };
    // 1 − e^{−iθ} = (1 − cos θ) + i sin θ
    let pre = C64::new(
        -scalars.alpha_sq * one_minus_cos,
        -scalars.alpha_sq * phase.sin(),
    )
    .exp();
    Ok(pre * (inv_z * sum))
}

/// Smallest number of Laguerre terms with e^{−βω·n} < 1e-14.
pub fn laguerre_terms_needed(beta_omega: f64) -> usize {
    if beta_omega.is_infinite() {
        return 1;
    }
    ((14.0 * std::f64::consts::LN_10) / beta_omega).floor() as usize + 1
}

fn check_pole(series: &CorrelationSeries, s: C64, sign: f64) -> Result<()> {
    let scale = s.norm() + series.omega;
    for (n, c) in series.iter() {
        if c == 0.0 {
            continue;
        }
        let pole = C64::new(0.0, sign * n as f64 * series.omega);
        if (s - pole).norm() <= 1e-14 * scale {
            return Err(Error::LaplacePole { n });
        }
    }
    Ok(())
}

/// Laplace transform of the series, C'(s) = Σ_n c_n / (s − inω).
pub fn corr_laplace(series: &CorrelationSeries, s: C64) -> Result<C64> {
    check_pole(series, s, 1.0)?;
    Ok(series
        .iter()
        .filter(|&(_, c)| c != 0.0)
        .map(|(n, c)| c / (s - C64::new(0.0, n as f64 * series.omega)))
        .sum())
}

/// Laplace transform of the conjugate series, C''(s) = Σ_n c_n / (s + inω).
pub fn corr_laplace_conj(series: &CorrelationSeries, s: C64) -> Result<C64> {
    check_pole(series, s, -1.0)?;
    Ok(series
        .iter()
        .filter(|&(_, c)| c != 0.0)
        .map(|(n, c)| c / (s + C64::new(0.0, n as f64 * series.omega)))
        .sum())
}

/// The four transforms C'(s ± iε), C''(s ± iε) entering the Laplace-space
/// equations of motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftedTransforms {
    pub c1_plus: C64,
    pub c1_minus: C64,
    pub c2_plus: C64,
    pub c2_minus: C64,
}

impl ShiftedTransforms {
    pub fn sum(&self) -> C64 {
        self.c1_plus + self.c1_minus + self.c2_plus + self.c2_minus
    }
}

pub fn shifted_transforms(
    series: &CorrelationSeries,
    s: C64,
    epsilon: f64,
) -> Result<ShiftedTransforms> {
    let ie = C64::new(0.0, epsilon);
    Ok(ShiftedTransforms {
        c1_plus: corr_laplace(series, s + ie)?,
        c1_minus: corr_laplace(series, s - ie)?,
        c2_plus: corr_laplace_conj(series, s + ie)?,
        c2_minus: corr_laplace_conj(series, s - ie)?,
    })
}
