//! Element-wise closed forms for the evolved figure-family state. These are
//! an independent path used to cross-check the superoperator pipeline.

use crate::channels::amplitude_damping::{ad_probability, ad_probability_rate};
use crate::channels::dephasing::dephasing_kernel;
use crate::channels::{check_time, ADParams, CorrelationStrength, DephasingParams};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, C64};
use crate::states::{DensityMatrix, InitialStateParams};

/// Dephasing: populations are frozen and ρ₂₃ scales by μ + (1−μ)Λ(t)².
pub fn analytic_state_dephasing(
    params: &DephasingParams,
    initial: InitialStateParams,
    mu: CorrelationStrength,
    t: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    initial.validate()?;
    let InitialStateParams { r, alpha } = initial;
    let mu = mu.value();
    let (lambda, _) = dephasing_kernel(t, params);
    let a2 = alpha * alpha;
    let outer = (1.0 - r) / 4.0;
    let mut m = ComplexMatrix::diag_real(&[
        outer,
        (1.0 + (3.0 - 4.0 * a2) * r) / 4.0,
        (1.0 - (1.0 - 4.0 * a2) * r) / 4.0,
        outer,
    ]);
    let c = alpha * (1.0 - a2).sqrt() * r * (mu + (1.0 - mu) * lambda * lambda);
    m[(1, 2)] = C64::new(c, 0.0);
    m[(2, 1)] = C64::new(c, 0.0);
    DensityMatrix::new(m)
}

/// Amplitude damping, written in terms of p_t.
pub fn analytic_state_ad(
    params: &ADParams,
    initial: InitialStateParams,
    mu: CorrelationStrength,
    t: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    initial.validate()?;
    let p = ad_probability(t, params)?;
    Ok(DensityMatrix::new_unchecked(ad_elements(initial, mu.value(), p)))
}

fn ad_elements(initial: InitialStateParams, mu: f64, p: f64) -> ComplexMatrix {
    let InitialStateParams { r, alpha } = initial;
    let a2 = alpha * alpha;
    let nu = 1.0 - mu;
    let p2 = p * p;
    let mut m = ComplexMatrix::diag_real(&[
        (1.0 - r) * (1.0 - p) * (1.0 - nu * p) / 4.0,
        (-4.0 * (1.0 - a2) * nu * r * p - nu * (1.0 - r) * p2 + (3.0 - 4.0 * a2) * r + 1.0) / 4.0,
        (-4.0 * a2 * nu * r * p - nu * (1.0 - r) * p2 - (1.0 - 4.0 * a2) * r + 1.0) / 4.0,
        ((2.0 - 3.0 * mu) * r * p + nu * (1.0 - r) * p2 - mu * p + 2.0 * p - r + 1.0) / 4.0,
    ]);
    let c = alpha * (1.0 - a2).sqrt() * r * (1.0 - nu * p);
    m[(1, 2)] = C64::new(c, 0.0);
    m[(2, 1)] = C64::new(c, 0.0);
    m
}

/// Singular values of ρ̇_t under amplitude damping, sorted descending.
///
/// The four expressions are the diagonal entries of ρ̇_t plus the
/// coherence pair collapsed to the α = 1/√2 case, so they coincide with the
/// true singular values only on that slice of the state family.
pub fn analytic_ad_singular_values(
    params: &ADParams,
    initial: InitialStateParams,
    mu: CorrelationStrength,
    t: f64,
) -> Result<Vec<f64>> {
    check_time(t)?;
    initial.validate()?;
    let r = initial.r;
    let mu = mu.value();
    let p = ad_probability(t, params)?;
    let dp = ad_probability_rate(t, params);
    let mut sv = vec![
        0.5 * (mu - 1.0) * (r - 1.0) * p * dp,
        0.5 * (mu - 1.0) * (r * p - p - 2.0 * r) * dp,
        0.25 * (-mu + 2.0 * mu * r * p - 2.0 * r * p - 2.0 * mu * p + 2.0 * p - 3.0 * mu * r + 2.0 * r + 2.0) * dp,
        0.25 * (mu + 2.0 * mu * r * p - 2.0 * r * p - 2.0 * mu * p + 2.0 * p - mu * r + 2.0 * r - 2.0) * dp,
    ]
    .into_iter()
    .map(f64::abs)
    .collect::<Vec<_>>();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::make_initial_state;

    fn mu(x: f64) -> CorrelationStrength {
        CorrelationStrength::new(x).unwrap()
    }

    #[test]
    fn dephasing_starts_at_initial_state() {
        let p = DephasingParams::new(1.0).unwrap();
        for (r, a) in [(0.5, std::f64::consts::FRAC_1_SQRT_2), (0.9, 0.3), (0.0, 1.0)] {
            let init = InitialStateParams::new(r, a).unwrap();
            let rho = analytic_state_dephasing(&p, init, mu(0.4), 0.0).unwrap();
            let rho0 = make_initial_state(init).unwrap();
            assert!(rho.matrix().max_abs_diff(rho0.matrix()) < 1e-15);
        }
    }

    #[test]
    fn ad_starts_at_initial_state() {
        let p = ADParams::new(2.0, 1.0).unwrap();
        let init = InitialStateParams::new(0.7, 0.4).unwrap();
        let rho = analytic_state_ad(&p, init, mu(0.6), 0.0).unwrap();
        let rho0 = make_initial_state(init).unwrap();
        assert!(rho.matrix().max_abs_diff(rho0.matrix()) < 1e-15);
    }

    #[test]
    fn ad_correlated_long_time_fills_ground_pair() {
        let init = InitialStateParams::figure_default();
        let m = ad_elements(init, 1.0, 1.0);
        assert!(m[(0, 0)].norm() < 1e-15);
        assert!((m[(3, 3)].re - (0.125 + 0.125)).abs() < 1e-15);
        assert!((m.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ad_trace_is_one_for_any_p() {
        let init = InitialStateParams::new(0.3, 0.8).unwrap();
        for &p in &[0.0, 0.2, 0.7, 1.0] {
            for &mu in &[0.0, 0.5, 1.0] {
                assert!((ad_elements(init, mu, p).trace().re - 1.0).abs() < 1e-15);
            }
        }
    }
}
