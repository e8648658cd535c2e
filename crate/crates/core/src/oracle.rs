//! Reference solutions that share no code path with the channel maps:
//! fixed-step RK4 integration of the master equations, finite-difference
//! derivatives, and the eigen-decomposition check of the SGAD generator.

use log::warn;
use serde::Serialize;

use crate::channels::{
    ad_rate, dephasing::dephasing_kernel_rate, dephasing_kernel, ADParams, ChannelParams, ChannelSpec,
    DephasingParams, SGADParams,
};
use crate::error::{QslError, Result};
use crate::linalg::{kron, pauli, trace_product, ComplexMatrix, C64};
use crate::states::DensityMatrix;

pub const DEFAULT_DT: f64 = 1e-3;
/// Entrywise change under step halving above which RK4 reports StepTooLarge.
pub const HALVING_TOL: f64 = 1e-7;
/// Trace drift beyond this is an error rather than renormalised away.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Time-dependent rates are clipped to this magnitude near their poles.
pub const RATE_CAP: f64 = 1e6;

/// Which part of a two-use channel a generator describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// One qubit (2×2 states).
    Single,
    /// Independent action on both qubits.
    Uncorrelated,
    /// Joint action through σ⊗σ jump operators.
    Correlated,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Zero(usize),
    Channel(ChannelParams, Branch),
}

/// A time-dependent Lindblad generator ρ ↦ L_t(ρ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladGenerator {
    kind: Kind,
}

impl LindbladGenerator {
    pub fn new(params: ChannelParams, branch: Branch) -> Self {
        Self {
            kind: Kind::Channel(params, branch),
        }
    }

    /// L = 0 on dim×dim matrices.
    pub fn zero(dim: usize) -> Self {
        Self { kind: Kind::Zero(dim) }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            Kind::Zero(d) => d,
            Kind::Channel(_, Branch::Single) => 2,
            Kind::Channel(..) => 4,
        }
    }

    pub fn apply(&self, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
        match self.kind {
            Kind::Zero(d) => ComplexMatrix::zeros(d, d),
            Kind::Channel(params, branch) => match params {
                ChannelParams::Dephasing(p) => dephasing_generator(&p, branch, t, rho),
                ChannelParams::AmplitudeDamping(p) => ad_generator(&p, branch, t, rho),
                ChannelParams::Sgad(p) => sgad_generator(&p, branch, rho),
            },
        }
    }
}

fn sandwich(a: &ComplexMatrix, rho: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * rho) * b
}

fn anticommutator(a: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    &(a * rho) + &(rho * a)
}

/// J ρ J† − ½{J†J, ρ}.
fn dissipator(j: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let jd = j.adjoint();
    &sandwich(j, rho, &jd) - &anticommutator(&(&jd * j), rho).scale_real(0.5)
}

fn on_first(a: &ComplexMatrix) -> ComplexMatrix {
    kron(a, &pauli::identity())
}

fn on_second(a: &ComplexMatrix) -> ComplexMatrix {
    kron(&pauli::identity(), a)
}

/// Dephasing rate κ_t = −Λ̇/(2Λ), capped near zeros of Λ.
fn dephasing_rate(params: &DephasingParams, t: f64) -> f64 {
    let (lambda, _) = dephasing_kernel(t, params);
    let rate = -dephasing_kernel_rate(t, params) / (2.0 * lambda);
    cap_rate(rate, t)
}

fn cap_rate(rate: f64, t: f64) -> f64 {
    if !rate.is_finite() || rate.abs() > RATE_CAP {
        warn!("rate {rate:e} at t = {t} clipped to ±{RATE_CAP:e}");
        return RATE_CAP.copysign(if rate.is_nan() { 1.0 } else { rate });
    }
    rate
}

fn dephasing_generator(params: &DephasingParams, branch: Branch, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let kappa = dephasing_rate(params, t);
    let flip = |u: &ComplexMatrix| &sandwich(u, rho, u) - rho;
    let z = pauli::sigma_z();
    let out = match branch {
        Branch::Single => flip(&z),
        Branch::Uncorrelated => &flip(&on_first(&z)) + &flip(&on_second(&z)),
        Branch::Correlated => flip(&kron(&z, &z)),
    };
    out.scale_real(kappa)
}

fn ad_generator(params: &ADParams, branch: Branch, t: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let gamma = match ad_rate(t, params) {
        Ok(g) => cap_rate(g, t),
        Err(_) => cap_rate(f64::INFINITY, t),
    };
    let sm = pauli::sigma_minus();
    let out = match branch {
        Branch::Single => dissipator(&sm, rho),
        Branch::Uncorrelated => &dissipator(&on_first(&sm), rho) + &dissipator(&on_second(&sm), rho),
        Branch::Correlated => dissipator(&kron(&sm, &sm), rho),
    };
    out.scale_real(gamma)
}

/// Squeezed thermal generator with lowering operator `sm` and raising `sp`.
fn sgad_terms(params: &SGADParams, sp: &ComplexMatrix, sm: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let SGADParams { n, m, omega } = *params;
    let decay = &anticommutator(&(sp * sm), rho) - &sandwich(sm, rho, sp).scale_real(2.0);
    let pump = &anticommutator(&(sm * sp), rho) - &sandwich(sp, rho, sm).scale_real(2.0);
    let squeeze = &sandwich(sp, rho, sp) + &sandwich(sm, rho, sm);
    let a = decay.scale_real(-omega * (n + 1.0) / 2.0);
    let b = pump.scale_real(-omega * n / 2.0);
    let c = squeeze.scale_real(-omega * m);
    &(&a + &b) + &c
}

fn sgad_generator(params: &SGADParams, branch: Branch, rho: &ComplexMatrix) -> ComplexMatrix {
    let (sp, sm) = (pauli::sigma_plus(), pauli::sigma_minus());
    match branch {
        Branch::Single => sgad_terms(params, &sp, &sm, rho),
        Branch::Uncorrelated => &sgad_terms(params, &on_first(&sp), &on_first(&sm), rho)
            + &sgad_terms(params, &on_second(&sp), &on_second(&sm), rho),
        Branch::Correlated => sgad_terms(params, &kron(&sp, &sp), &kron(&sm, &sm), rho),
    }
}

fn rk4_fixed(gen: &LindbladGenerator, rho0: &ComplexMatrix, t_final: f64, dt: f64) -> ComplexMatrix {
    let steps = (t_final / dt).ceil().max(0.0) as usize;
    if steps == 0 {
        return rho0.clone();
    }
    let h = t_final / steps as f64;
    let mut rho = rho0.clone();
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = gen.apply(t, &rho);
        let k2 = gen.apply(t + h / 2.0, &(&rho + &k1.scale_real(h / 2.0)));
        let k3 = gen.apply(t + h / 2.0, &(&rho + &k2.scale_real(h / 2.0)));
        let k4 = gen.apply(t + h, &(&rho + &k3.scale_real(h)));
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        rho = &rho + &incr.scale_real(h / 6.0);
    }
    rho
}

/// Classic RK4 from 0 to `t_final` on matrices of any size, with a
/// step-halving consistency check and trace renormalisation.
pub fn rk4_integrate(gen: &LindbladGenerator, rho0: &ComplexMatrix, t_final: f64, dt: f64) -> Result<ComplexMatrix> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(QslError::ParamOutOfRange {
            name: "dt",
            value: dt,
            reason: "must be positive",
        });
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(QslError::ParamOutOfRange {
            name: "t_final",
            value: t_final,
            reason: "must be finite and non-negative",
        });
    }
    if rho0.rows() != gen.dim() || rho0.cols() != gen.dim() {
        return Err(QslError::DimensionMismatch {
            expected: format!("{0}x{0}", gen.dim()),
            found: format!("{}x{}", rho0.rows(), rho0.cols()),
        });
    }
    let coarse = rk4_fixed(gen, rho0, t_final, dt);
    let fine = rk4_fixed(gen, rho0, t_final, dt / 2.0);
    let change = coarse.max_abs_diff(&fine);
    if change > HALVING_TOL {
        return Err(QslError::StepTooLarge { change });
    }
    let fine = fine.hermitian_part();
    let drift = (fine.trace() - rho0.trace()).norm();
    if drift > TRACE_DRIFT_TOL {
        return Err(QslError::TraceDrift { drift });
    }
    let tr = fine.trace().re;
    Ok(if tr != 0.0 { fine.scale_real(rho0.trace().re / tr) } else { fine })
}

/// RK4 evolution of a two-qubit state; output positivity is checked
/// within −1e−7.
pub fn rk4_evolve(gen: &LindbladGenerator, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    let out = rk4_integrate(gen, rho0.matrix(), t_final, dt)?;
    let min = *crate::linalg::hermitian_eigenvalues(&out)?.last().expect("non-empty");
    if min < -1e-7 {
        return Err(QslError::PositivityViolation { min_eigenvalue: min });
    }
    DensityMatrix::new(out)
}

/// (1−μ)·RK4(uncorrelated) + μ·RK4(correlated).
pub fn rk4_combined(spec: &ChannelSpec, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<DensityMatrix> {
    let mu = spec.mu.value();
    let un = LindbladGenerator::new(spec.params, Branch::Uncorrelated);
    let co = LindbladGenerator::new(spec.params, Branch::Correlated);
    let mut acc = ComplexMatrix::zeros(4, 4);
    if mu < 1.0 {
        acc = &acc + &rk4_integrate(&un, rho0.matrix(), t, dt)?.scale_real(1.0 - mu);
    }
    if mu > 0.0 {
        acc = &acc + &rk4_integrate(&co, rho0.matrix(), t, dt)?.scale_real(mu);
    }
    DensityMatrix::new(acc)
}

/// (ρ(t+h) − ρ(t−h)) / 2h, symmetrised to be Hermitian.
pub fn fd_derivative(state_fn: impl Fn(f64) -> Result<ComplexMatrix>, t: f64, h: f64) -> Result<ComplexMatrix> {
    if !(h > 0.0) || t < h {
        return Err(QslError::ParamOutOfRange {
            name: "h",
            value: h,
            reason: "need h > 0 and t >= h",
        });
    }
    let d = &state_fn(t + h)? - &state_fn(t - h)?;
    Ok(d.scale_real(0.5 / h).hermitian_part())
}

/// Residuals of the right/left eigenoperator relations of the single-qubit
/// SGAD generator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub params: SGADParams,
    /// η₁..η₄ as used in the check.
    pub eigenvalues: [f64; 4],
    /// ‖L(Rᵢ) − ηᵢRᵢ‖_F.
    pub right_residuals: [f64; 4],
    /// ‖L*(Lᵢ) − ηᵢLᵢ‖_F with L* the dual under the pairing tr(AB).
    pub left_residuals: [f64; 4],
    /// max |tr(LᵢRⱼ) − δᵢⱼ|.
    pub biorthogonality_defect: f64,
    /// max over matrix units X of ‖L(X) − Σ ηᵢ tr(LᵢX) Rᵢ‖_F.
    pub reconstruction_residual: f64,
}

impl SpectralReport {
    pub fn max_residual(&self) -> f64 {
        self.right_residuals
            .iter()
            .chain(&self.left_residuals)
            .copied()
            .fold(self.biorthogonality_defect.max(self.reconstruction_residual), f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// The four eigenoperator pairs (Rᵢ, Lᵢ).
pub fn sgad_eigenoperators(params: &SGADParams) -> [(ComplexMatrix, ComplexMatrix); 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let k = 1.0 / (2.0 * params.n + 1.0);
    let (i2, z) = (pauli::identity(), pauli::sigma_z());
    let (sp, sm) = (pauli::sigma_plus(), pauli::sigma_minus());
    let r1 = (&i2 - &z.scale_real(k)).scale_real(s);
    let l1 = i2.scale_real(s);
    let r2 = (&sp + &sm).scale_real(s);
    let r3 = (&sm - &sp).scale_real(s);
    let r4 = z.scale_real(s);
    let l4 = (&i2.scale_real(k) + &z).scale_real(s);
    [(r1, l1), (r2.clone(), r2), (r3.clone(), r3.scale_real(-1.0)), (r4, l4)]
}

pub fn spectral_check(params: &SGADParams) -> SpectralReport {
    let gen = LindbladGenerator::new(ChannelParams::Sgad(*params), Branch::Single);
    let eta = params.eigenvalues();
    let pairs = sgad_eigenoperators(params);
    let apply = |x: &ComplexMatrix| gen.apply(0.0, x);
    // L*(A) is defined by tr(L*(A)·X) = tr(A·L(X)); build it on matrix units.
    let dual_apply = |a: &ComplexMatrix| {
        ComplexMatrix::from_fn(2, 2, |i, j| {
            trace_product(a, &apply(&ComplexMatrix::unit(2, j, i))).expect("2x2")
        })
    };
    let mut right = [0.0; 4];
    let mut left = [0.0; 4];
    let mut bio = 0.0_f64;
    for (i, (r, l)) in pairs.iter().enumerate() {
        right[i] = (&apply(r) - &r.scale_real(eta[i])).frobenius_norm();
        left[i] = (&dual_apply(l) - &l.scale_real(eta[i])).frobenius_norm();
        for (j, (rj, _)) in pairs.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            let got = trace_product(l, rj).expect("2x2");
            bio = bio.max((got - C64::new(want, 0.0)).norm());
        }
    }
    let mut recon = 0.0_f64;
    for a in 0..2 {
        for b in 0..2 {
            let x = ComplexMatrix::unit(2, a, b);
            let mut rebuilt = ComplexMatrix::zeros(2, 2);
            for (i, (r, l)) in pairs.iter().enumerate() {
                let w = trace_product(l, &x).expect("2x2") * eta[i];
                rebuilt = &rebuilt + &r.scale(w);
            }
            recon = recon.max((&apply(&x) - &rebuilt).frobenius_norm());
        }
    }
    SpectralReport {
        params: *params,
        eigenvalues: eta,
        right_residuals: right,
        left_residuals: left,
        biorthogonality_defect: bio,
        reconstruction_residual: recon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ad_probability, single_qubit_map, superop};
    use crate::states::{make_initial_state, InitialStateParams};

    #[test]
    fn zero_generator_leaves_state() {
        let rho = make_initial_state(InitialStateParams::figure_default()).unwrap();
        let out = rk4_evolve(&LindbladGenerator::zero(4), &rho, 1.0, DEFAULT_DT).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn ad_excited_population_tracks_survival() {
        let p = ADParams::new(2.0, 1.0).unwrap();
        let gen = LindbladGenerator::new(ChannelParams::AmplitudeDamping(p), Branch::Single);
        let excited = ComplexMatrix::unit(2, 0, 0);
        for t in [0.3, 1.0, 2.5] {
            let out = rk4_integrate(&gen, &excited, t, DEFAULT_DT).unwrap();
            assert!((out[(0, 0)].re - (1.0 - ad_probability(t, &p).unwrap())).abs() < 1e-7);
        }
    }

    #[test]
    fn sgad_single_qubit_map_matches_rk4() {
        let params = ChannelParams::Sgad(SGADParams::new(1.0, 1.0, 1.0).unwrap());
        let gen = LindbladGenerator::new(params, Branch::Single);
        let rho = ComplexMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]);
        let t = 0.7;
        let exact = superop::apply(&single_qubit_map(&params, t).unwrap(), &rho);
        let rk = rk4_integrate(&gen, &rho, t, DEFAULT_DT).unwrap();
        assert!(exact.max_abs_diff(&rk) < 1e-6);
    }

    #[test]
    fn spectral_check_paper_case() {
        let r = spectral_check(&SGADParams::new(0.0, 0.0, 1.0).unwrap());
        assert_eq!(r.eigenvalues, [0.0, -0.5, -0.5, -1.0]);
        assert!(r.passes(1e-12), "{r:?}");
    }

    #[test]
    fn fd_derivative_of_exponential() {
        let f = |t: f64| Ok(ComplexMatrix::diag_real(&[(-t).exp(), 0.0]));
        let d = fd_derivative(f, 1.0, 1e-4).unwrap();
        assert!((d[(0, 0)].re + (-1f64).exp()).abs() < 1e-8);
        assert!(fd_derivative(f, 0.0, 1e-4).is_err());
    }

    #[test]
    fn halving_check_catches_coarse_steps() {
        let p = ChannelParams::Sgad(SGADParams::new(3.0, 0.0, 5.0).unwrap());
        let gen = LindbladGenerator::new(p, Branch::Uncorrelated);
        let rho = make_initial_state(InitialStateParams::figure_default()).unwrap();
        assert!(matches!(
            rk4_integrate(&gen, rho.matrix(), 1.0, 0.1),
            Err(QslError::StepTooLarge { .. })
        ));
    }
}
