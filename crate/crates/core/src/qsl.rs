//! Relative purity, the ML and MT speed integrands, their time averages
//! and the unified speed-limit time
//!
//! τ_QSL = max{1/⟨ΣΛᵢβᵢ⟩, 1/⟨√ΣΛᵢ²⟩} · |f − 1| · tr(ρ_τ²),
//!
//! where Λᵢ are the singular values of ρ̇_t, βᵢ those of ρ_τ, and ⟨·⟩ is
//! the average over [τ, τ + τ_D].

use serde::{Deserialize, Serialize};

use crate::channels::{
    self, combined_state_jet, dephasing_kernel, evolve, uncorrelated_state_jet, ChannelFamily, ChannelParams, ChannelSpec,
    DephasingParams,
};
use crate::error::{QslError, Result};
use crate::linalg::{hermitian_eigenvalues, singular_values_hermitian, trace_product, ComplexMatrix, C64};
use crate::states::{make_initial_state, DensityMatrix, InitialStateParams};

pub const DEFAULT_QUAD_STEPS: usize = 512;
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Target relative accuracy of each time average.
pub const QUAD_REL_TOL: f64 = 1e-6;
/// Cap on the starting step count and on the Simpson panels refinement may add.
pub const MAX_QUAD_STEPS: usize = 1 << 14;
/// Numerator and ML average both below this mark the dynamics as frozen.
pub const FROZEN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum DerivativeMode {
    /// Exact derivative of the closed-form channel scalars.
    Analytic,
    /// Central difference of evolved states with step `h`.
    Fd { h: f64 },
}

impl Default for DerivativeMode {
    fn default() -> Self {
        DerivativeMode::Analytic
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActiveBound {
    ML,
    MT,
}

impl ActiveBound {
    pub fn label(self) -> &'static str {
        match self {
            ActiveBound::ML => "ML",
            ActiveBound::MT => "MT",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QslQuery {
    pub spec: ChannelSpec,
    pub initial: InitialStateParams,
    pub tau: f64,
    pub tau_d: f64,
    pub quad_steps: usize,
    pub deriv: DerivativeMode,
}

impl QslQuery {
    /// Query with default quadrature and analytic derivatives.
    pub fn new(spec: ChannelSpec, initial: InitialStateParams, tau: f64, tau_d: f64) -> Result<Self> {
        let q = Self {
            spec,
            initial,
            tau,
            tau_d,
            quad_steps: DEFAULT_QUAD_STEPS,
            deriv: DerivativeMode::Analytic,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_quad_steps(mut self, steps: usize) -> Result<Self> {
        self.quad_steps = steps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_deriv(mut self, deriv: DerivativeMode) -> Result<Self> {
        self.deriv = deriv;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.params.validate()?;
        self.initial.validate()?;
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(QslError::ParamOutOfRange {
                name: "tau",
                value: self.tau,
                reason: "must be finite and non-negative",
            });
        }
        if !(self.tau_d > 0.0) || !self.tau_d.is_finite() {
            return Err(QslError::ParamOutOfRange {
                name: "tau_d",
                value: self.tau_d,
                reason: "must be finite and positive",
            });
        }
        check_steps(self.quad_steps)?;
        if let DerivativeMode::Fd { h } = self.deriv {
            if !(h > 0.0) || !h.is_finite() {
                return Err(QslError::ParamOutOfRange {
                    name: "fd_step",
                    value: h,
                    reason: "must be positive",
                });
            }
        }
        Ok(())
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 || steps % 2 != 0 || steps > MAX_QUAD_STEPS {
        return Err(QslError::ParamOutOfRange {
            name: "quad_steps",
            value: steps as f64,
            reason: "must be even, positive and at most 16384",
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QslResult {
    /// Relative purity f(τ + τ_D).
    pub f: f64,
    /// tr(ρ_τ²).
    pub purity: f64,
    /// |f − 1| · tr(ρ_τ²).
    pub numerator: f64,
    pub ml_avg: f64,
    pub mt_avg: f64,
    pub tau_qsl: f64,
    pub active_bound: ActiveBound,
    pub frozen: bool,
    pub quad_error_estimate: f64,
    /// Simpson panels used by the converged average.
    pub quad_steps_used: usize,
}

/// f = tr(ρ_τ ρ') / tr(ρ_τ²).
pub fn relative_purity(rho_tau: &DensityMatrix, rho_later: &DensityMatrix) -> Result<f64> {
    let purity = rho_tau.purity();
    if purity < 0.25 - 1e-9 {
        return Err(QslError::DegeneratePurity { purity });
    }
    Ok(trace_product(rho_tau.matrix(), rho_later.matrix())?.re / purity)
}

/// Hermitian, trace-free projection of a derivative estimate.
fn clean_derivative(m: ComplexMatrix) -> ComplexMatrix {
    let mut m = m.hermitian_part();
    let shift = m.trace().re / m.rows() as f64;
    for i in 0..m.rows() {
        m[(i, i)] -= C64::new(shift, 0.0);
    }
    m
}

/// ρ̇_t for the evolution of the given initial state.
pub fn state_derivative(
    spec: &ChannelSpec,
    initial: InitialStateParams,
    t: f64,
    deriv: DerivativeMode,
) -> Result<ComplexMatrix> {
    let rho0 = make_initial_state(initial)?;
    match deriv {
        DerivativeMode::Analytic => {
            let (_, rate) = combined_state_jet(spec, rho0.matrix(), t)?;
            Ok(clean_derivative(rate))
        }
        DerivativeMode::Fd { h } => {
            let state = |s: f64| evolve(&rho0, spec, s).map(DensityMatrix::into_matrix);
            finite_difference(state, t, h).map(clean_derivative)
        }
    }
}

/// Central difference, or a second-order forward difference when t < h.
pub(crate) fn finite_difference(
    state: impl Fn(f64) -> Result<ComplexMatrix>,
    t: f64,
    h: f64,
) -> Result<ComplexMatrix> {
    if t >= h {
        let d = &state(t + h)? - &state(t - h)?;
        Ok(d.scale_real(0.5 / h))
    } else {
        let a = state(t)?.scale_real(-3.0);
        let b = state(t + h)?.scale_real(4.0);
        let c = state(t + 2.0 * h)?;
        Ok((&(&a + &b) - &c).scale_real(0.5 / h))
    }
}

/// Σ Λᵢβᵢ with both lists sorted descending and paired by rank.
pub fn ml_pairing(rho_dot: &ComplexMatrix, beta: &[f64]) -> Result<f64> {
    let lambda = singular_values_hermitian(rho_dot)?;
    Ok(lambda.iter().zip(beta).map(|(l, b)| l * b).sum())
}

/// √ΣΛᵢ², the Frobenius norm of ρ̇.
pub fn mt_norm(rho_dot: &ComplexMatrix) -> f64 {
    rho_dot.frobenius_norm()
}

/// ML integrand at time t ≥ τ.
pub fn ml_integrand(spec: &ChannelSpec, initial: InitialStateParams, tau: f64, t: f64) -> Result<f64> {
    let rho0 = make_initial_state(initial)?;
    let beta = evolve(&rho0, spec, tau)?.eigenvalues();
    ml_pairing(&state_derivative(spec, initial, t, DerivativeMode::Analytic)?, &beta)
}

/// MT integrand at time t.
pub fn mt_integrand(spec: &ChannelSpec, initial: InitialStateParams, t: f64) -> Result<f64> {
    Ok(mt_norm(&state_derivative(spec, initial, t, DerivativeMode::Analytic)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Average<const K: usize> {
    pub value: [f64; K],
    /// Summed panel error estimates, largest across components.
    pub error_estimate: f64,
    pub steps: usize,
}

/// Composite Simpson average of a scalar integrand over [τ, τ + τ_D].
pub fn time_average(integrand: impl Fn(f64) -> Result<f64>, tau: f64, tau_d: f64, quad_steps: usize) -> Result<(f64, f64)> {
    let avg = time_average_many(|t| Ok([integrand(t)?]), tau, tau_d, quad_steps)?;
    Ok((avg.value[0], avg.error_estimate))
}

/// Simpson averages of several integrands sharing the same samples.
///
/// The interval is cut into `quad_steps / 2` Simpson panels. Each panel is
/// compared with its two halves and split further until the halves agree
/// within its share of [`QUAD_REL_TOL`] times the coarse integral, so kinks
/// in |eigenvalue| integrands only refine the panels that contain them.
pub fn time_average_many<const K: usize>(
    integrand: impl Fn(f64) -> Result<[f64; K]>,
    tau: f64,
    tau_d: f64,
    quad_steps: usize,
) -> Result<Average<K>> {
    check_steps(quad_steps)?;
    let h = tau_d / quad_steps as f64;
    let samples = (0..=quad_steps)
        .map(|k| integrand(tau + h * k as f64))
        .collect::<Result<Vec<_>>>()?;
    let panels: Vec<Panel<K>> = (0..quad_steps / 2)
        .map(|k| Panel::new(tau + 2.0 * h * k as f64, 2.0 * h, samples[2 * k], samples[2 * k + 1], samples[2 * k + 2]))
        .collect();
    let mut coarse = [0.0; K];
    for p in &panels {
        add_into(&mut coarse, &p.whole);
    }
    let mut density = [0.0; K];
    for c in 0..K {
        density[c] = (QUAD_REL_TOL * coarse[c].abs()).max(1e-14 * tau_d) / tau_d;
    }
    let mut acc = Refinement {
        value: [0.0; K],
        error: [0.0; K],
        leaves: 0,
    };
    for p in panels {
        refine(&integrand, p, &density, 0, &mut acc)?;
    }
    let mut value = acc.value;
    let mut worst = 0.0_f64;
    for c in 0..K {
        value[c] /= tau_d;
        worst = worst.max(acc.error[c] / tau_d);
    }
    Ok(Average {
        value,
        error_estimate: worst,
        steps: 2 * acc.leaves,
    })
}

/// Deepest split below a starting panel.
const MAX_REFINE_DEPTH: u32 = 24;

#[derive(Clone, Copy)]
struct Panel<const K: usize> {
    a: f64,
    w: f64,
    fa: [f64; K],
    fm: [f64; K],
    fb: [f64; K],
    whole: [f64; K],
}

impl<const K: usize> Panel<K> {
    fn new(a: f64, w: f64, fa: [f64; K], fm: [f64; K], fb: [f64; K]) -> Self {
        let mut whole = [0.0; K];
        for c in 0..K {
            whole[c] = w / 6.0 * (fa[c] + 4.0 * fm[c] + fb[c]);
        }
        Self { a, w, fa, fm, fb, whole }
    }
}

struct Refinement<const K: usize> {
    value: [f64; K],
    error: [f64; K],
    leaves: usize,
}

fn add_into<const K: usize>(acc: &mut [f64; K], v: &[f64; K]) {
    for c in 0..K {
        acc[c] += v[c];
    }
}

fn refine<const K: usize>(
    integrand: &impl Fn(f64) -> Result<[f64; K]>,
    p: Panel<K>,
    density: &[f64; K],
    depth: u32,
    acc: &mut Refinement<K>,
) -> Result<()> {
    let half = 0.5 * p.w;
    let left = Panel::new(p.a, half, p.fa, integrand(p.a + 0.25 * p.w)?, p.fm);
    let right = Panel::new(p.a + half, half, p.fm, integrand(p.a + 0.75 * p.w)?, p.fb);
    let mut ok = true;
    let mut diff = [0.0; K];
    for c in 0..K {
        diff[c] = left.whole[c] + right.whole[c] - p.whole[c];
        if diff[c].abs() > 15.0 * density[c] * p.w {
            ok = false;
        }
    }
    if ok {
        for c in 0..K {
            acc.value[c] += left.whole[c] + right.whole[c] + diff[c] / 15.0;
            acc.error[c] += diff[c].abs() / 15.0;
        }
        acc.leaves += 2;
        return Ok(());
    }
    if depth >= MAX_REFINE_DEPTH || acc.leaves > MAX_QUAD_STEPS {
        let rel = (0..K)
            .map(|c| diff[c].abs() / (p.whole[c].abs().max(1e-300)))
            .fold(0.0, f64::max);
        return Err(QslError::QuadratureNonConvergent {
            steps: 2 * acc.leaves,
            relative_change: rel,
        });
    }
    refine(integrand, left, density, depth + 1, acc)?;
    refine(integrand, right, density, depth + 1, acc)
}

/// Unified QSL time for one query.
pub fn qsl_time(query: &QslQuery) -> Result<QslResult> {
    query.validate()?;
    let spec = &query.spec;
    let rho0 = make_initial_state(query.initial)?;
    let rho_tau = evolve(&rho0, spec, query.tau)?;
    let rho_later = evolve(&rho0, spec, query.tau + query.tau_d)?;
    let purity = rho_tau.purity();
    let f = relative_purity(&rho_tau, &rho_later)?;
    let numerator = (f - 1.0).abs() * purity;
    let beta = rho_tau.eigenvalues();

    let avg = time_average_many(
        |t| {
            let rho_dot = match query.deriv {
                DerivativeMode::Analytic => clean_derivative(combined_state_jet(spec, rho0.matrix(), t)?.1),
                DerivativeMode::Fd { h } => clean_derivative(finite_difference(
                    |s| evolve(&rho0, spec, s).map(DensityMatrix::into_matrix),
                    t,
                    h,
                )?),
            };
            Ok([ml_pairing(&rho_dot, &beta)?, mt_norm(&rho_dot)])
        },
        query.tau,
        query.tau_d,
        query.quad_steps,
    )?;
    let [ml_avg, mt_avg] = avg.value;
    let active_bound = if ml_avg <= mt_avg { ActiveBound::ML } else { ActiveBound::MT };

    let frozen = numerator < FROZEN_TOL && ml_avg < FROZEN_TOL;
    let tau_qsl = if frozen {
        match spec.params {
            ChannelParams::Dephasing(p) => frozen_dephasing_limit(&p, query, &rho0)?,
            _ => 0.0,
        }
    } else {
        numerator / ml_avg.min(mt_avg)
    };
    Ok(QslResult {
        f,
        purity,
        numerator,
        ml_avg,
        mt_avg,
        tau_qsl,
        active_bound,
        frozen,
        quad_error_estimate: avg.error_estimate,
        quad_steps_used: avg.steps,
    })
}

/// μ → 1⁻ limit of τ_QSL for dephasing.
///
/// The correlated branch leaves the state fixed, so the numerator and both
/// averages carry a common factor (1 − μ) that cancels. What remains uses
/// the uncorrelated branch's increment and rate together with ρ_τ = ρ₀.
fn frozen_dephasing_limit(params: &DephasingParams, query: &QslQuery, rho0: &DensityMatrix) -> Result<f64> {
    let p = ChannelParams::Dephasing(*params);
    let m0 = rho0.matrix();
    let start = uncorrelated_state_jet(&p, m0, query.tau)?.0;
    let end = uncorrelated_state_jet(&p, m0, query.tau + query.tau_d)?.0;
    let numerator = trace_product(m0, &(&end - &start))?.re.abs();
    let beta = hermitian_eigenvalues(m0)?;
    let avg = time_average_many(
        |t| {
            let rate = clean_derivative(uncorrelated_state_jet(&p, m0, t)?.1);
            Ok([ml_pairing(&rate, &beta)?, mt_norm(&rate)])
        },
        query.tau,
        query.tau_d,
        query.quad_steps,
    )?;
    let den = avg.value[0].min(avg.value[1]);
    if den < FROZEN_TOL {
        return Ok(0.0);
    }
    Ok(numerator / den)
}

/// Closed-form dephasing QSL time for the figure state family.
///
/// Numerator 2α²(1−α²)r²·g(τ)·(Λ(τ+τ_D)² − Λ(τ)²) in absolute value with
/// g = μ + (1−μ)Λ², over (2√2 α√(1−α²) r / τ_D)∫(−ΛΛ̇)dt. The integral is
/// signed, so the result turns negative on windows where Λ² grows, which
/// happens for ν ≥ 1/4. See [`qsl_dephasing_closed_form_unsigned`].
pub fn qsl_dephasing_closed_form(
    params: &DephasingParams,
    initial: InitialStateParams,
    mu: channels::CorrelationStrength,
    tau: f64,
    tau_d: f64,
    quad_steps: usize,
) -> Result<f64> {
    dephasing_closed_form(params, initial, mu, tau, tau_d, quad_steps, false)
}

/// As [`qsl_dephasing_closed_form`] with |ΛΛ̇| in the integral, matching
/// the nonnegative singular values the pipeline averages.
pub fn qsl_dephasing_closed_form_unsigned(
    params: &DephasingParams,
    initial: InitialStateParams,
    mu: channels::CorrelationStrength,
    tau: f64,
    tau_d: f64,
    quad_steps: usize,
) -> Result<f64> {
    dephasing_closed_form(params, initial, mu, tau, tau_d, quad_steps, true)
}

fn dephasing_closed_form(
    params: &DephasingParams,
    initial: InitialStateParams,
    mu: channels::CorrelationStrength,
    tau: f64,
    tau_d: f64,
    quad_steps: usize,
    unsigned: bool,
) -> Result<f64> {
    initial.validate()?;
    let InitialStateParams { r, alpha } = initial;
    let mu = mu.value();
    let l2 = |t: f64| dephasing_kernel(t, params).0.powi(2);
    let a2 = alpha * alpha;
    let numerator = (2.0 * a2 * (1.0 - a2) * r * r * (mu + (1.0 - mu) * l2(tau)) * (l2(tau + tau_d) - l2(tau))).abs();
    let (avg, _) = time_average(
        |t| {
            let v = -dephasing_kernel(t, params).0 * channels::dephasing::dephasing_kernel_rate(t, params);
            Ok(if unsigned { v.abs() } else { v })
        },
        tau,
        tau_d,
        quad_steps,
    )?;
    let denominator = 2.0 * std::f64::consts::SQRT_2 * alpha * (1.0 - a2).sqrt() * r * avg;
    if numerator == 0.0 {
        return Ok(0.0);
    }
    Ok(numerator / denominator)
}

/// Convenience wrapper: τ_QSL for a family at the figure state.
pub fn figure_qsl(params: ChannelParams, mu: f64, tau: f64, tau_d: f64) -> Result<QslResult> {
    let spec = ChannelSpec::new(params, mu)?;
    qsl_time(&QslQuery::new(spec, InitialStateParams::figure_default(), tau, tau_d)?)
}

/// True when the family's correlated branch is stationary.
pub fn has_frozen_correlated_branch(family: ChannelFamily) -> bool {
    family == ChannelFamily::Dephasing
}
