//! Driving the command layer from a TOML configuration, as the binary does.
//!
//!     cargo run --release --example config_pipeline

use rabi_thermo::commands::{cmd_simulate, cmd_spectrum};
use rabi_thermo::config::RunConfig;

const CONFIG: &str = r#"
units = "natural"
rho0 = 1.0

[model]
epsilon = 0.0
delta = 0.5
omega = 0.5
g = 0.1

[temperature]
value = 0.001

[solver]
methods = ["single", "series", "poles"]
n_max = 6

[time]
dt = 0.2
n_samples = 1024
"#;

fn main() -> rabi_thermo::Result<()> {
    let cfg = RunConfig::from_toml(CONFIG)?;
    let out = std::env::temp_dir().join("rabi-thermo-example");
    for path in cmd_simulate(&cfg, &out)?.into_iter().chain(cmd_spectrum(Some(&cfg), None, &out)?) {
        let size = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!("{} ({size} bytes)", path.display());
    }
    let head: Vec<String> = std::fs::read_to_string(out.join("trajectory.csv"))
        .map_err(rabi_thermo::Error::from)?
        .lines()
        .take(3)
        .map(String::from)
        .collect();
    println!("\n{}", head.join("\n"));
    Ok(())
}
