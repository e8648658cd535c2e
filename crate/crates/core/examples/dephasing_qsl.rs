// Speed limit under colored dephasing: correlations slow the evolution,
// and the fully correlated channel freezes it.

use qsl_core::channels::{dephasing_kernel, ChannelParams, DephasingParams};
use qsl_core::qsl::figure_qsl;
use qsl_core::Result;

pub fn run_example() -> Result<()> {
    for nu in [0.1, 1.0] {
        let params = DephasingParams::new(nu)?;
        let regime = if params.is_non_markovian() { "non-Markovian" } else { "Markovian" };
        println!("nu = {nu} ({regime}), kernel at t=1: {:.4}", dephasing_kernel(1.0, &params).0);
        for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let r = figure_qsl(ChannelParams::Dephasing(params), mu, 1.0, 2.0)?;
            println!(
                "  mu={mu:<4}  tau_qsl={:.5}  f={:.5}  bound={}  frozen={}",
                r.tau_qsl,
                r.f,
                r.active_bound.label(),
                r.frozen
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
