// A thinned figure preset written as CSV, the format `qsl sweep` emits.

use qsl_core::sweep::{preset, run_sweep, write_csv, PRESETS};
use qsl_core::Result;

pub fn run_example() -> Result<()> {
    println!("presets: {}", PRESETS.join(", "));
    let mut config = preset("fig2b")?;
    // Every tenth driving time keeps this quick; the full preset has 100.
    config.tau_d = config.tau_d.iter().step_by(10).copied().collect();
    let rows = run_sweep(&config)?;
    let mut out = Vec::new();
    write_csv(&rows, &config, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
