use approx::assert_abs_diff_eq;
use qsl_core::channels::{
    ad_probability, ad_rate, analytic_state_ad, analytic_state_dephasing, combined_map, correlated_two_qubit_map,
    dephasing_kernel, evolve, kraus, sgad_scalars, single_qubit_map, uncorrelated_two_qubit_map, ADParams,
    ChannelParams, ChannelSpec, CorrelationStrength, DephasingParams, SGADParams,
};
use qsl_core::linalg::ComplexMatrix;
use qsl_core::states::{make_initial_state, InitialStateParams};
use qsl_core::QslError;

fn families() -> Vec<ChannelParams> {
    vec![
        ChannelParams::Dephasing(DephasingParams::new(0.1).unwrap()),
        ChannelParams::Dephasing(DephasingParams::new(1.0).unwrap()),
        ChannelParams::AmplitudeDamping(ADParams::new(2.0, 1.0).unwrap()),
        ChannelParams::AmplitudeDamping(ADParams::new(0.2, 1.0).unwrap()),
        ChannelParams::Sgad(SGADParams::new(1.0, 0.0, 1.0).unwrap()),
        ChannelParams::Sgad(SGADParams::new(1.0, 1.0, 1.0).unwrap()),
    ]
}

#[test]
fn dephasing_kernel_values() {
    let p = DephasingParams::new(1.0).unwrap();
    let w = 15.0_f64.sqrt();
    let expected = (-0.5_f64).exp() * ((w / 2.0).cos() + (w / 2.0).sin() / w);
    let (lambda, z) = dephasing_kernel(1.0, &p);
    assert_abs_diff_eq!(lambda, expected, epsilon = 1e-14);
    assert_abs_diff_eq!(z, (1.0 - expected) / 2.0, epsilon = 1e-14);
    assert_eq!(dephasing_kernel(0.0, &p), (1.0, 0.0));
    let (late, z_late) = dephasing_kernel(400.0, &DephasingParams::new(0.1).unwrap());
    assert!(late.abs() < 1e-12 && (z_late - 0.5).abs() < 1e-12);
}

#[test]
fn markovian_dephasing_kernel_uses_hyperbolic_branch() {
    // (4ν)² < 1: Λ = e^{−x}(cosh(kx) + sinh(kx)/k), k = √(1 − 16ν²).
    let nu = 0.1;
    let k = (1.0_f64 - 16.0 * nu * nu).sqrt();
    for t in [0.3, 1.0, 4.0] {
        let x = t / (2.0 * nu);
        let expected = (-x).exp() * ((k * x).cosh() + (k * x).sinh() / k);
        assert_abs_diff_eq!(dephasing_kernel(t, &DephasingParams::new(nu).unwrap()).0, expected, epsilon = 1e-12);
    }
}

#[test]
fn ad_probability_at_critical_damping() {
    let p = ADParams::new(2.0, 1.0).unwrap();
    assert_eq!(ad_probability(0.0, &p).unwrap(), 0.0);
    for t in [0.5_f64, 1.0, 3.0] {
        let expected = 1.0 - (-2.0 * t).exp() * (1.0 + t).powi(2);
        assert_abs_diff_eq!(ad_probability(t, &p).unwrap(), expected, epsilon = 1e-13);
    }
    assert_eq!(ad_rate(0.0, &p).unwrap(), 0.0);
}

#[test]
fn ad_rate_approaches_gamma0_for_wide_baths() {
    let p = ADParams::new(400.0, 1.0).unwrap();
    let d = p.d().re;
    assert_abs_diff_eq!(ad_rate(5.0, &p).unwrap(), 2.0 * 400.0 / (400.0 + d), epsilon = 1e-9);
}

#[test]
fn ad_rate_pole_is_reported() {
    // G_t first vanishes where tan(0.3t) = −3 for λ = 0.2.
    let p = ADParams::new(0.2, 1.0).unwrap();
    let pole = (std::f64::consts::PI - 3.0_f64.atan()) / 0.3;
    assert!(matches!(ad_rate(pole, &p), Err(QslError::PoleEncountered { .. })));
    assert!(ad_rate(pole - 0.05, &p).unwrap() > 10.0);
}

#[test]
fn sgad_scalars_values() {
    let s = sgad_scalars(1.0, &SGADParams::new(1.0, 1.0, 1.0).unwrap());
    assert_abs_diff_eq!(s.p, (-1.5_f64).exp(), epsilon = 1e-15);
    assert_abs_diff_eq!(s.q, 1.0_f64.cosh(), epsilon = 1e-15);
    assert_abs_diff_eq!(s.r, 1.0_f64.sinh(), epsilon = 1e-15);
    assert_abs_diff_eq!(s.u, (-1.0_f64).exp(), epsilon = 1e-15);
    assert_abs_diff_eq!(s.s, (-2.0_f64).exp(), epsilon = 1e-15);
    let s0 = sgad_scalars(0.0, &SGADParams::new(2.0, 1.0, 1.0).unwrap());
    assert_eq!((s0.p, s0.q, s0.r, s0.u, s0.s), (1.0, 1.0, 0.0, 1.0, 1.0));
}

#[test]
fn sgad_relaxes_to_thermal_population() {
    let params = ChannelParams::Sgad(SGADParams::new(1.5, 0.0, 1.0).unwrap());
    let map = single_qubit_map(&params, 60.0).unwrap();
    let out = ComplexMatrix::unvectorize(&map.apply(&ComplexMatrix::unit(2, 0, 0).vectorize()).unwrap(), 2);
    assert_abs_diff_eq!(out[(0, 0)].re, 1.5 / 4.0, epsilon = 1e-12);
}

#[test]
fn maps_are_identity_at_zero_and_mix_linearly() {
    for p in families() {
        assert!(single_qubit_map(&p, 0.0).unwrap().max_abs_diff(&ComplexMatrix::identity(4)) == 0.0);
        assert!(uncorrelated_two_qubit_map(&p, 0.0).unwrap().superoperator().max_abs_diff(&ComplexMatrix::identity(16)) == 0.0);
        assert!(correlated_two_qubit_map(&p, 0.0).unwrap().superoperator().max_abs_diff(&ComplexMatrix::identity(16)) == 0.0);
        let t = 0.9;
        let un = uncorrelated_two_qubit_map(&p, t).unwrap();
        let co = correlated_two_qubit_map(&p, t).unwrap();
        let half = combined_map(&ChannelSpec::new(p, 0.5).unwrap(), t).unwrap();
        let avg = (un.superoperator() + co.superoperator()).scale_real(0.5);
        assert!(half.superoperator().max_abs_diff(&avg) < 1e-15);
        assert_eq!(combined_map(&ChannelSpec::new(p, 0.0).unwrap(), t).unwrap(), un);
        assert_eq!(combined_map(&ChannelSpec::new(p, 1.0).unwrap(), t).unwrap(), co);
    }
}

#[test]
fn cptp_across_grid() {
    for p in families() {
        for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for k in 0..=20 {
                let t = k as f64 * 0.5;
                let map = combined_map(&ChannelSpec::new(p, mu).unwrap(), t).unwrap();
                assert!(map.trace_preservation_defect() <= 1e-9);
                assert!(map.hermiticity_preservation_defect() <= 1e-9);
                if !matches!(p, ChannelParams::Sgad(_)) {
                    assert!(map.min_choi_eigenvalue() >= -1e-8, "{p:?} mu={mu} t={t}");
                }
            }
        }
    }
}

#[test]
fn kraus_sets_are_complete() {
    let d = DephasingParams::new(1.0).unwrap();
    let a = ADParams::new(0.2, 1.0).unwrap();
    for t in [0.0, 0.4, 2.0, 7.0] {
        assert!(kraus::dephasing_single(&d, t).defect() < 1e-12);
        assert!(kraus::dephasing_correlated(&d, t).defect() < 1e-12);
        assert!(kraus::ad_single(&a, t).unwrap().defect() < 1e-12);
        assert!(kraus::ad_correlated(&a, t).unwrap().defect() < 1e-12);
        assert!(kraus::ad_uncorrelated(&a, t).unwrap().defect() < 1e-12);
    }
}

#[test]
fn printed_sgad_kraus_set_is_incomplete() {
    let set = kraus::sgad_single_printed(&SGADParams::new(0.0, 0.0, 1.0).unwrap(), 0.8);
    assert!(set.defect() > 1e-3);
}

#[test]
fn kraus_and_superoperator_paths_agree() {
    let rho0 = make_initial_state(InitialStateParams::new(0.7, 0.4).unwrap()).unwrap();
    let a = ADParams::new(2.0, 1.0).unwrap();
    let t = 1.1;
    let via_kraus = kraus::ad_correlated(&a, t).unwrap().apply(rho0.matrix());
    let via_map = correlated_two_qubit_map(&ChannelParams::AmplitudeDamping(a), t).unwrap().apply(rho0.matrix());
    assert!(via_kraus.max_abs_diff(&via_map) < 1e-14);
}

#[test]
fn dephasing_is_frozen_when_fully_correlated() {
    let rho0 = make_initial_state(InitialStateParams::figure_default()).unwrap();
    let spec = ChannelSpec::new(ChannelParams::Dephasing(DephasingParams::new(1.0).unwrap()), 1.0).unwrap();
    for t in [0.3, 2.0, 9.5] {
        assert!((evolve(&rho0, &spec, t).unwrap().matrix() - rho0.matrix()).frobenius_norm() <= 1e-10);
    }
}

#[test]
fn ad_evolution_matches_closed_form_at_critical_damping() {
    let init = InitialStateParams::figure_default();
    let rho0 = make_initial_state(init).unwrap();
    let a = ADParams::new(2.0, 1.0).unwrap();
    let rho = evolve(&rho0, &ChannelSpec::new(ChannelParams::AmplitudeDamping(a), 0.0).unwrap(), 1.0).unwrap();
    // Independently: with μ = 0 the |00⟩ population is (1−r)(1−p)²/4 and p = 1 − 4e^{−2}.
    let keep = 4.0 * (-2.0_f64).exp();
    assert_abs_diff_eq!(rho.element(0, 0).re, 0.5 * keep * keep / 4.0, epsilon = 1e-14);
    let closed = analytic_state_ad(&a, init, CorrelationStrength::new(0.0).unwrap(), 1.0).unwrap();
    assert!(rho.matrix().max_abs_diff(closed.matrix()) <= 1e-9);
}

#[test]
fn closed_forms_on_grid() {
    for init in [InitialStateParams::figure_default(), InitialStateParams::new(0.8, 0.35).unwrap()] {
        let rho0 = make_initial_state(init).unwrap();
        for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let m = CorrelationStrength::new(mu).unwrap();
            for k in 0..=20 {
                let t = k as f64 * 0.5;
                for nu in [0.1, 1.0] {
                    let d = DephasingParams::new(nu).unwrap();
                    let by_map = evolve(&rho0, &ChannelSpec::new(ChannelParams::Dephasing(d), mu).unwrap(), t).unwrap();
                    let closed = analytic_state_dephasing(&d, init, m, t).unwrap();
                    assert!(by_map.matrix().max_abs_diff(closed.matrix()) <= 1e-9);
                }
                for lambda in [2.0, 0.2] {
                    let a = ADParams::new(lambda, 1.0).unwrap();
                    let by_map =
                        evolve(&rho0, &ChannelSpec::new(ChannelParams::AmplitudeDamping(a), mu).unwrap(), t).unwrap();
                    let closed = analytic_state_ad(&a, init, m, t).unwrap();
                    assert!(by_map.matrix().max_abs_diff(closed.matrix()) <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(DephasingParams::new(0.0).is_err());
    assert!(ADParams::new(-1.0, 1.0).is_err());
    assert!(SGADParams::new(1.0, 1.5, 1.0).is_err());
    assert!(ChannelSpec::new(ChannelParams::Dephasing(DephasingParams::new(1.0).unwrap()), -0.1).is_err());
    assert!(combined_map(&ChannelSpec::new(families()[0], 0.5).unwrap(), f64::NAN).is_err());
}
