//! The bath correlation function evaluated four independent ways.
//!
//!     cargo run --example correlation_oracles

use std::f64::consts::PI;

use rabi_thermo::correlation::{corr_closed, corr_laguerre_oracle, corr_series, stable_weights};
use rabi_thermo::exact::{corr_fock_oracle, FockTruncation};
use rabi_thermo::model::polaron_scalars;
use rabi_thermo::{RabiParams, ThermalOscillator, UnitSystem};

fn main() -> rabi_thermo::Result<()> {
    let p = RabiParams::new(1e8, 1e8, 1e9, 1e8)?;
    let osc = ThermalOscillator::from_temperature(p.omega, 0.010, UnitSystem::Physical)?;
    let s = polaron_scalars(&p, &osc)?;
    let series = stable_weights(&s, 20);
    let trunc = FockTruncation::new(60)?;

    println!("weights c_n, n = -3..=3:");
    for n in -3..=3 {
        println!("  c_{n:<2} = {:.6e}", series.weight(n));
    }
    println!("sum of weights (n_max = 20): {:.15}", series.total());

    println!("\n{:>8} {:>24} {:>10} {:>10} {:>10}", "ωτ/π", "closed form", "|series|", "|laguerre|", "|fock|");
    for k in 0..=4 {
        let tau = k as f64 * 0.5 * PI / p.omega;
        let c = corr_closed(&s, tau);
        let d_series = (corr_series(&series, tau) - c).norm();
        let d_lag = (corr_laguerre_oracle(&s, tau, 60)? - c).norm();
        let d_fock = (corr_fock_oracle(&p, &osc, trunc, tau)? - c).norm();
        println!(
            "{:>8.2} {:>11.8}{:+.8}i {d_series:>10.1e} {d_lag:>10.1e} {d_fock:>10.1e}",
            k as f64 * 0.5,
            c.re,
            c.im
        );
    }
    Ok(())
}
