//! Lab-frame evolution of the qubit coupled to a thermal oscillator, by
//! diagonalising the truncated Hamiltonian.
//!
//!     cargo run --example exact_dynamics

use rabi_thermo::exact::{ExactPropagator, FockTruncation, QubitInit};
use rabi_thermo::trajectory::uniform_grid;
use rabi_thermo::{RabiParams, ThermalOscillator, UnitSystem};

fn main() -> rabi_thermo::Result<()> {
    let p = RabiParams::new(1e8, 1e8, 1e9, 1e8)?;
    let osc = ThermalOscillator::from_temperature(p.omega, 0.010, UnitSystem::Physical)?;
    let trunc = FockTruncation::auto(&p, &osc);
    println!("Fock truncation: {} levels", trunc.dim());

    let prop = ExactPropagator::new(&p, QubitInit::population(1.0), &osc, trunc)?;
    let times = uniform_grid(11, 5e-9);
    let traj = prop.trajectory(&times)?;
    println!("{:>8} {:>12} {:>12}", "t (ns)", "rho00", "|rho10|");
    for i in 0..traj.len() {
        println!("{:>8.1} {:>12.8} {:>12.8}", traj.times[i] * 1e9, traj.rho00[i], traj.rho10[i].norm());
    }
    Ok(())
}
