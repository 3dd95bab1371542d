//! Multi-harmonic polaron dynamics: the time-domain series solver, its
//! spectrum, and the Laplace poles that predict the lines.
//!
//!     cargo run --release --example series_and_poles

use rabi_thermo::dynamics::{pole_expansion, pole_reconstruction_dynamics, series_dynamics, spectrum};
use rabi_thermo::trajectory::uniform_grid;
use rabi_thermo::{RabiParams, ThermalOscillator, UnitSystem};

fn main() -> rabi_thermo::Result<()> {
    // Natural units: tunnelling resonant with the oscillator, a cold bath.
    let p = RabiParams::new(0.0, 0.5, 0.5, 0.1)?;
    let osc = ThermalOscillator::from_temperature(0.5, 0.001, UnitSystem::Natural)?;
    let n_max = 10;
    let times = uniform_grid(4096, 0.2);

    let series = series_dynamics(&p, &osc, 1.0, n_max, &times, None)?;
    let poles = pole_reconstruction_dynamics(&p, &osc, 1.0, n_max, &times)?;
    println!("sup |series - poles| over t ≤ {:.0}: {:.2e}", times[times.len() - 1], series.sup_distance(&poles));

    let spec = spectrum(&series)?;
    println!("\nstrongest lines of the series spectrum (bin {:.4}):", spec.bin_width());
    for q in spec.peaks().iter().take(4) {
        println!("  ω = {:.4}  amplitude {:.4}", q.frequency, q.amplitude);
    }

    let exp = pole_expansion(&p, &osc, 1.0, n_max)?;
    let mut lines: Vec<(f64, f64)> = exp.frequencies.iter().copied().zip(exp.residues.iter().copied()).collect();
    lines.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    println!("\nlargest pole residues (stationary value {:.4}):", exp.stationary);
    for (x, r) in lines.iter().take(4) {
        println!("  s = ±{x:.4}i  residue {r:+.4}");
    }
    Ok(())
}
