//! Inferring the oscillator temperature from the qubit's oscillation
//! frequency: simulate, fit, invert.
//!
//!     cargo run --release --example thermometry

use std::f64::consts::TAU;

use rabi_thermo::thermometry::{sensitivity_curve, sweep, RoundtripConfig};
use rabi_thermo::{RabiParams, UnitSystem};

fn main() -> rabi_thermo::Result<()> {
    let p = RabiParams::new(0.0, 1e8, 1e9, 1e7)?;

    let cfg = RoundtripConfig::default();
    let temps: Vec<f64> = (20..=55).step_by(5).map(|m| m as f64 * 1e-3).collect();
    println!("{:>7} {:>14} {:>9} {:>10} {:>14}", "T (mK)", "Ω_fit (rad/s)", "T_out", "|err| mK", "10 kHz → mK");
    for r in sweep(&p, &temps, &cfg)? {
        println!(
            "{:>7.1} {:>14.6e} {:>9.3} {:>10.4} {:>14.2}",
            r.t_in * 1e3,
            r.omega_fit,
            r.t_out * 1e3,
            r.abs_error * 1e3,
            r.t_uncertainty_from_df * 1e3
        );
    }

    let grid: Vec<f64> = (1..=20).map(|k| k as f64 * 5e-3).collect();
    let curve = sensitivity_curve(&p, UnitSystem::Physical, &grid)?;
    let steepest = curve.iter().max_by(|a, b| a.domega_dt.abs().total_cmp(&b.domega_dt.abs())).unwrap();
    println!(
        "\nsteepest response at {:.0} mK: dΩ/dT = {:.3e} rad/s/K ({:.1} kHz per mK)",
        steepest.t * 1e3,
        steepest.domega_dt,
        steepest.domega_dt.abs() * 1e-3 / TAU * 1e-3
    );
    Ok(())
}
