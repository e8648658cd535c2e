// Squeezed thermal damping checked against independent references: a
// Runge–Kutta integration of the master equation and the generator's
// eigenoperators.

use qsl_core::channels::sgad::printed_correlated_state;
use qsl_core::channels::{evolve, ChannelParams, ChannelSpec, SGADParams};
use qsl_core::oracle::{rk4_combined, spectral_check, DEFAULT_DT};
use qsl_core::states::{make_initial_state, InitialStateParams};
use qsl_core::Result;

pub fn run_example() -> Result<()> {
    let params = SGADParams::new(1.0, 1.0, 1.0)?;
    let rho0 = make_initial_state(InitialStateParams::new(0.8, 0.35)?)?;

    for t in [0.3, 1.0, 2.5] {
        let spec = ChannelSpec::new(ChannelParams::Sgad(params), 1.0)?;
        let by_map = evolve(&rho0, &spec, t)?;
        let by_rk4 = rk4_combined(&spec, &rho0, t, DEFAULT_DT)?;
        let printed = printed_correlated_state(rho0.matrix(), &params, t);
        println!(
            "t={t:<4} map vs RK4 {:.1e}   published closed form vs RK4 {:.3}",
            by_map.matrix().max_abs_diff(by_rk4.matrix()),
            printed.max_abs_diff(by_rk4.matrix())
        );
    }

    for (n, m) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (2.0, 1.5)] {
        let report = spectral_check(&SGADParams::new(n, m, 1.0)?);
        println!(
            "n={n} m={m}: eigenvalues {:?}  worst residual {:.1e}",
            report.eigenvalues,
            report.max_residual()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
