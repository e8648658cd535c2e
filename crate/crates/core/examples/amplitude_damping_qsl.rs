// Amplitude damping with a Lorentzian bath: the decay probability, the
// divergence of the time-local rate in the strong-coupling regime, and the
// resulting speed limit times.

use qsl_core::channels::{ad_probability, ad_rate, ADParams, ChannelParams};
use qsl_core::qsl::figure_qsl;
use qsl_core::Result;

pub fn run_example() -> Result<()> {
    for lambda in [2.0, 0.2] {
        let params = ADParams::new(lambda, 1.0)?;
        println!("lambda = {lambda}, non-Markovian: {}", params.is_non_markovian());
        for t in [0.5, 2.0, 6.0] {
            let rate = match ad_rate(t, &params) {
                Ok(g) => format!("{g:+.4}"),
                Err(e) => format!("({e})"),
            };
            println!("  t={t:<4} p_t={:.5}  gamma_t={rate}", ad_probability(t, &params)?);
        }
        for mu in [0.0, 0.5, 1.0] {
            let r = figure_qsl(ChannelParams::AmplitudeDamping(params), mu, 1.0, 1.0)?;
            println!("  mu={mu:<4} tau_qsl={:.5}  ml_avg={:.5}  mt_avg={:.5}", r.tau_qsl, r.ml_avg, r.mt_avg);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
