//! Dominant spectral line of ρ00(t) from the single-term closed form and
//! from exact evolution, as the coupling grows.
//!
//!     cargo run --release --example single_term_vs_exact

use std::f64::consts::TAU;

use rabi_thermo::dynamics::{effective_frequency, single_term_dynamics, spectrum};
use rabi_thermo::exact::{evolve_exact, FockTruncation, QubitInit};
use rabi_thermo::trajectory::uniform_grid;
use rabi_thermo::{RabiParams, ThermalOscillator, UnitSystem};

fn main() -> rabi_thermo::Result<()> {
    let omega = 1e9;
    let osc = ThermalOscillator::from_temperature(omega, 0.010, UnitSystem::Physical)?;
    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>10}", "g/ω", "Ω_r", "Ω_eff", "single peak", "exact peak", "sup|Δρ00|");
    for ratio in [0.1, 0.25, 0.5] {
        let p = RabiParams::new(1e8, 1e8, omega, ratio * omega)?;
        let w_eff = effective_frequency(&p, &osc)?;
        let times = uniform_grid(64 * 32, TAU / w_eff / 32.0);
        let single = single_term_dynamics(&p, &osc, 1.0, &times)?;
        let exact = evolve_exact(&p, QubitInit::population(1.0), &osc, FockTruncation::auto(&p, &osc), &times)?;
        let peak = |t| spectrum(t).map(|s| s.dominant_peak().map_or(0.0, |q| q.frequency));
        println!(
            "{ratio:>5} {:>12.5e} {w_eff:>12.5e} {:>12.5e} {:>12.5e} {:>10.3}",
            p.rabi_frequency(),
            peak(&single)?,
            peak(&exact)?,
            single.sup_distance(&exact)
        );
    }
    Ok(())
}
