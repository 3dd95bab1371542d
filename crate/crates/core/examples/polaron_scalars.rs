//! Thermal and polaron scalars for a physical-unit qubit, and where the
//! single-term approximation stops being trustworthy.
//!
//!     cargo run --example polaron_scalars

use rabi_thermo::model::{polaron_scalars, single_term_validity};
use rabi_thermo::{RabiParams, ThermalOscillator, UnitSystem};

fn main() -> rabi_thermo::Result<()> {
    let omega = 1e9;
    let osc = ThermalOscillator::from_temperature(omega, 0.010, UnitSystem::Physical)?;
    println!("T = 10 mK, ω = 1e9 rad/s: βω = {:.6}, N = {:.6}", osc.beta_omega, osc.occupation());

    println!("{:>6} {:>10} {:>10} {:>10} {:>6}", "g/ω", "|α|²", "b", "z", "valid");
    for ratio in [0.0, 0.05, 0.1, 0.25, 0.5] {
        let p = RabiParams::new(1e8, 1e8, omega, ratio * omega)?;
        let s = polaron_scalars(&p, &osc)?;
        let v = single_term_validity(&s);
        println!("{ratio:>6} {:>10.4} {:>10.4} {:>10.4} {:>6}", s.alpha_sq, s.b, s.z, v.valid);
    }
    Ok(())
}
