// Closed-form evolved states and singular values compared with the
// map-based pipeline.

use qsl_core::channels::{
    analytic_ad_singular_values, analytic_state_ad, analytic_state_dephasing, evolve, ADParams, ChannelParams,
    ChannelSpec, CorrelationStrength, DephasingParams,
};
use qsl_core::linalg::singular_values_hermitian;
use qsl_core::qsl::{state_derivative, DerivativeMode};
use qsl_core::states::{make_initial_state, InitialStateParams};
use qsl_core::Result;

pub fn run_example() -> Result<()> {
    let init = InitialStateParams::figure_default();
    let rho0 = make_initial_state(init)?;
    let deph = DephasingParams::new(0.1)?;
    let ad = ADParams::new(2.0, 1.0)?;

    for mu in [0.0, 0.5, 1.0] {
        let m = CorrelationStrength::new(mu)?;
        let t = 1.7;
        let d = evolve(&rho0, &ChannelSpec::new(ChannelParams::Dephasing(deph), mu)?, t)?;
        let a_spec = ChannelSpec::new(ChannelParams::AmplitudeDamping(ad), mu)?;
        let a = evolve(&rho0, &a_spec, t)?;
        let sv = singular_values_hermitian(&state_derivative(&a_spec, init, t, DerivativeMode::Analytic)?)?;
        let sv_closed = analytic_ad_singular_values(&ad, init, m, t)?;
        println!(
            "mu={mu:<4} dephasing {:.1e}  AD {:.1e}  AD singular values {:.1e}",
            d.matrix().max_abs_diff(analytic_state_dephasing(&deph, init, m, t)?.matrix()),
            a.matrix().max_abs_diff(analytic_state_ad(&ad, init, m, t)?.matrix()),
            sv.iter().zip(&sv_closed).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
