//! Numerically exact reference dynamics in a truncated Fock space.
//!
//! Basis ordering is qubit-outer, Fock-inner: index `q * dim + n` with q = 0
//! the σz = +1 state. The lab-frame Hamiltonian is real symmetric, so a single
//! real eigendecomposition gives the propagator at every time.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{RabiParams, ThermalOscillator};
use crate::special::{laguerre, LnFactorials};
use crate::trajectory::{check_times, Method, QubitTrajectory};

/// Default bound on the thermal population beyond the last retained level.
pub const DEFAULT_TAIL_CUTOFF: f64 = 1e-10;

const REDUCED_TRACE_TOL: f64 = 1e-9;

/// Number of oscillator levels kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockTruncation {
    dim: usize,
}

impl FockTruncation {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::param("dim", format!("need at least 2 levels, got {dim}")));
        }
        Ok(FockTruncation { dim })
    }

    /// Twice the smallest dimension whose thermal tail is below
    /// [`DEFAULT_TAIL_CUTOFF`], widened when the polaron displacement is large.
    pub fn auto(params: &RabiParams, osc: &ThermalOscillator) -> Self {
        let thermal = thermal_dim(osc.beta_omega, DEFAULT_TAIL_CUTOFF);
        let a = params.alpha();
        let margin = (a * a + 8.0 * a).ceil() as usize + 8;
        FockTruncation {
            dim: (2 * thermal).max(thermal + margin).max(2),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Thermal probability of finding the oscillator at level ≥ dim.
    pub fn tail_mass(&self, beta_omega: f64) -> f64 {
        (-beta_omega * self.dim as f64).exp()
    }
}

fn thermal_dim(beta_omega: f64, cutoff: f64) -> usize {
    if beta_omega.is_infinite() {
        return 1;
    }
    ((1.0 / cutoff).ln() / beta_omega).floor() as usize + 1
}

/// `ε/2 σz + Δ/2 σx + ω a†a + g(a + a†)σz` on the truncated space.
pub fn build_hamiltonian(params: &RabiParams, trunc: FockTruncation) -> DMatrix<f64> {
    let d = trunc.dim;
    let mut h = DMatrix::zeros(2 * d, 2 * d);
    for q in 0..2 {
        let sz = if q == 0 { 1.0 } else { -1.0 };
        let off = q * d;
        for n in 0..d {
            h[(off + n, off + n)] = 0.5 * sz * params.epsilon + params.omega * n as f64;
            if n + 1 < d {
                let c = params.g * sz * ((n + 1) as f64).sqrt();
                h[(off + n, off + n + 1)] = c;
                h[(off + n + 1, off + n)] = c;
            }
        }
    }
    for n in 0..d {
        h[(n, d + n)] = 0.5 * params.delta;
        h[(d + n, n)] = 0.5 * params.delta;
    }
    h
}

/// Normalized thermal populations of the retained levels.
pub fn thermal_populations(osc: &ThermalOscillator, trunc: FockTruncation) -> Result<Vec<f64>> {
    thermal_populations_with_cutoff(osc, trunc, DEFAULT_TAIL_CUTOFF)
}

pub fn thermal_populations_with_cutoff(
    osc: &ThermalOscillator,
    trunc: FockTruncation,
    cutoff: f64,
) -> Result<Vec<f64>> {
    let tail = trunc.tail_mass(osc.beta_omega);
    if tail > cutoff {
        return Err(Error::TruncationUnconverged {
            dim: trunc.dim,
            tail,
            cutoff,
            suggested: 2 * thermal_dim(osc.beta_omega, cutoff),
        });
    }
    let mut p: Vec<f64> = if osc.beta_omega.is_infinite() {
        let mut v = vec![0.0; trunc.dim];
        v[0] = 1.0;
        v
    } else {
        (0..trunc.dim)
            .map(|n| (-osc.beta_omega * n as f64).exp())
            .collect()
    };
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(p)
}

/// Thermal oscillator state as a diagonal matrix.
pub fn thermal_state(osc: &ThermalOscillator, trunc: FockTruncation) -> Result<DMatrix<f64>> {
    let p = thermal_populations(osc, trunc)?;
    Ok(DMatrix::from_diagonal(&DVector::from_vec(p)))
}

/// Initial reduced qubit state; the oscillator starts thermal and uncorrelated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitInit {
    pub rho00: f64,
    pub rho01: C64,
}

impl QubitInit {
    /// Population `rho00` in |0⟩, no coherence.
    pub fn population(rho00: f64) -> Self {
        QubitInit {
            rho00,
            rho01: C64::new(0.0, 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let p = self.rho00;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("rho00", format!("must lie in [0, 1], got {p}")));
        }
        if self.rho01.norm_sqr() > p * (1.0 - p) + 1e-15 {
            return Err(Error::param("rho01", "initial qubit state is not positive"));
        }
        Ok(())
    }
}

/// Eigendecomposition of H together with the initial state written in the
/// eigenbasis. Immutable once built; every time point costs O(d²).
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    dim: usize,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
    rho_eig: DMatrix<C64>,
    w00: DMatrix<C64>,
    w11: DMatrix<C64>,
    w10: DMatrix<C64>,
}

impl ExactPropagator {
    pub fn new(
        params: &RabiParams,
        init: QubitInit,
        osc: &ThermalOscillator,
        trunc: FockTruncation,
    ) -> Result<Self> {
        params.validate()?;
        init.validate()?;
        let d = trunc.dim;
        let p = thermal_populations(osc, trunc)?;
        let h = build_hamiltonian(params, trunc);
        let eig = SymmetricEigen::new(h);
        let mut energies = eig.eigenvalues;
        // A global energy offset only changes an unobservable phase.
        let shift = energies.mean();
        energies.add_scalar_mut(-shift);
        let vectors = eig.eigenvectors;

        let v0 = vectors.rows(0, d).into_owned();
        let v1 = vectors.rows(d, d).into_owned();
        let pv0 = DMatrix::from_fn(d, 2 * d, |n, j| p[n] * v0[(n, j)]);
        let pv1 = DMatrix::from_fn(d, 2 * d, |n, j| p[n] * v1[(n, j)]);
        let to_c = |m: DMatrix<f64>| m.map(|x| C64::new(x, 0.0));
        let rho11 = 1.0 - init.rho00;
        let mut rho_eig = to_c(v0.transpose() * &pv0 * init.rho00 + v1.transpose() * &pv1 * rho11);
        if init.rho01 != C64::new(0.0, 0.0) {
            let cross = to_c(v0.transpose() * &pv1);
            rho_eig += &cross * init.rho01 + cross.transpose() * init.rho01.conj();
        }

        let w00 = to_c(v0.transpose() * &v0).component_mul(&rho_eig);
        let w11 = to_c(v1.transpose() * &v1).component_mul(&rho_eig);
        let w10 = to_c(v1.transpose() * &v0).component_mul(&rho_eig);
        Ok(ExactPropagator {
            dim: d,
            energies,
            vectors,
            rho_eig,
            w00,
            w11,
            w10,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn phases(&self, t: f64) -> DVector<C64> {
        self.energies.map(|e| C64::from_polar(1.0, -e * t))
    }

    /// (ρ00, ρ11, ρ10) of the reduced qubit state at time `t`.
    pub fn reduced(&self, t: f64) -> (C64, C64, C64) {
        let f = self.phases(t);
        let fc = f.map(|c| c.conj());
        let quad = |w: &DMatrix<C64>| f.dot(&(w * &fc));
        (quad(&self.w00), quad(&self.w11), quad(&self.w10))
    }

    /// Full qubit⊗oscillator density matrix at time `t` (O(d³)).
    pub fn joint_state(&self, t: f64) -> DMatrix<C64> {
        let f = self.phases(t);
        let n = f.len();
        let evolved = DMatrix::from_fn(n, n, |j, l| f[j] * self.rho_eig[(j, l)] * f[l].conj());
        let v = self.vectors.map(|x| C64::new(x, 0.0));
        &v * evolved * v.transpose()
    }

    pub fn trajectory(&self, times: &[f64]) -> Result<QubitTrajectory> {
        check_times(times)?;
        let mut rho00 = Vec::with_capacity(times.len());
        let mut rho10 = Vec::with_capacity(times.len());
        for &t in times {
            let (p0, p1, c10) = self.reduced(t);
            let drift = (p0.re + p1.re - 1.0)
                .abs()
                .max(p0.im.abs())
                .max(p1.im.abs());
            if !(drift <= REDUCED_TRACE_TOL) {
                return Err(Error::Consistency(format!(
                    "reduced state at t = {t:e} drifted from unit trace / Hermiticity by {drift:e}"
                )));
            }
            rho00.push(p0.re);
            rho10.push(c10);
        }
        let traj = QubitTrajectory {
            times: times.to_vec(),
            rho00,
            rho10,
            method: Method::Exact,
        };
        if let Some(i) = traj.positivity_violation(REDUCED_TRACE_TOL) {
            return Err(Error::Consistency(format!(
                "reduced state lost positivity at t = {:e}",
                times[i]
            )));
        }
        Ok(traj)
    }
}

/// Exact reduced qubit dynamics from the product state ρ_q ⊗ ρ_thermal.
pub fn evolve_exact(
    params: &RabiParams,
    init: QubitInit,
    osc: &ThermalOscillator,
    trunc: FockTruncation,
    times: &[f64],
) -> Result<QubitTrajectory> {
    check_times(times)?;
    ExactPropagator::new(params, init, osc, trunc)?.trajectory(times)
}

fn coeff(n: usize, m: usize, xi: C64, lnf: &LnFactorials) -> C64 {
    if m < n {
        // act with D† on ⟨m| instead
        return coeff(m, n, -xi, lnf).conj();
    }
    let k = m - n;
    let r2 = xi.norm_sqr();
    if r2 == 0.0 {
        return C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    let ln_mag = 0.5 * (lnf.get(n) - lnf.get(m)) - 0.5 * r2 + k as f64 * xi.norm().ln();
    let lag = laguerre(n, k as f64, r2);
    C64::from_polar(ln_mag.exp() * lag, k as f64 * xi.arg())
}

/// Displaced number-state coefficient ⟨m|D(ξ)|n⟩ from the associated Laguerre
/// closed form.
pub fn displaced_number_coeffs(n: usize, m: usize, xi: C64) -> C64 {
    coeff(n, m, xi, &LnFactorials::new(n.max(m)))
}

/// Matrix elements ⟨m|D(ξ)|n⟩ for m, n < dim (exact elements, not the
/// exponential of a truncated generator).
pub fn displacement_matrix(xi: C64, trunc: FockTruncation) -> DMatrix<C64> {
    let d = trunc.dim;
    let lnf = LnFactorials::new(d);
    DMatrix::from_fn(d, d, |m, n| coeff(n, m, xi, &lnf))
}

/// exp(ξa† − ξ*a) of the truncated generator.
pub fn displacement_matrix_expm(xi: C64, trunc: FockTruncation) -> DMatrix<C64> {
    let d = trunc.dim;
    let mut gen = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for n in 0..d - 1 {
        let s = ((n + 1) as f64).sqrt();
        gen[(n + 1, n)] = xi * s;
        gen[(n, n + 1)] = -xi.conj() * s;
    }
    gen.exp()
}

/// C(τ) = Tr[ρ_B D(α e^{iωτ}) D(α)†] evaluated in the truncated Fock basis.
pub fn corr_fock_oracle(
    params: &RabiParams,
    osc: &ThermalOscillator,
    trunc: FockTruncation,
    tau: f64,
) -> Result<C64> {
    let p = thermal_populations(osc, trunc)?;
    let alpha = params.alpha();
    let later = displacement_matrix(C64::from_polar(alpha, params.omega * tau), trunc);
    let now = displacement_matrix(C64::new(alpha, 0.0), trunc);
    let d = trunc.dim;
    let mut acc = C64::new(0.0, 0.0);
    for (n, &pn) in p.iter().enumerate() {
        if pn == 0.0 {
            continue;
        }
        let diag: C64 = (0..d).map(|m| later[(n, m)] * now[(n, m)].conj()).sum();
        acc += diag * pn;
    }
    Ok(acc)
}
