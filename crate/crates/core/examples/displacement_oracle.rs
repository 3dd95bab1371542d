//! Displacement operator matrix elements: closed form against the matrix
//! exponential of the truncated generator.
//!
//!     cargo run --example displacement_oracle

use num_complex::Complex64 as C64;
use rabi_thermo::exact::{displaced_number_coeffs, displacement_matrix, displacement_matrix_expm, FockTruncation};

fn main() -> rabi_thermo::Result<()> {
    let xi = C64::new(0.2, 0.0);
    println!("<3|D(0.2)|1> closed form = {:.15}", displaced_number_coeffs(1, 3, xi));

    let big = FockTruncation::new(60)?;
    let exact = displacement_matrix(xi, big);
    let expm = displacement_matrix_expm(xi, big);
    for block in [10, 20, 30, 50, 60] {
        let mut worst = 0.0f64;
        for m in 0..block {
            for n in 0..block {
                worst = worst.max((exact[(m, n)] - expm[(m, n)]).norm());
            }
        }
        println!("max deviation on the leading {block:>2}x{block:<2} block: {worst:.2e}");
    }
    Ok(())
}
