//! Time-indexed two-qubit channels.
//!
//! Each family comes in an uncorrelated form (independent action on both
//! qubits), a fully correlated form, and the μ-weighted mixture
//! (1−μ)·ε_un + μ·ε_co. Maps are stored as 16×16 column-stacking
//! superoperators so the mixture is a literal convex combination.

pub mod amplitude_damping;
pub mod closed_form;
pub mod dephasing;
pub mod kraus;
pub mod sgad;
pub(crate) mod superop;

use serde::{Deserialize, Serialize};

use crate::dual::{Dual, DualMatrix};
use crate::error::{QslError, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{min_eigenvalue, DensityMatrix};

pub use amplitude_damping::{ad_probability, ad_rate, ADParams};
pub use closed_form::{analytic_ad_singular_values, analytic_state_ad, analytic_state_dephasing};
pub use dephasing::{dephasing_kernel, DephasingParams};
pub use kraus::{kraus_defect, KrausSet};
pub use sgad::{sgad_scalars, SGADParams, SgadScalars};
pub use superop::{choi_matrix, hermiticity_preservation_defect, min_choi_eigenvalue, trace_preservation_defect};

/// Probabilities may leave [0, 1] by at most this much before it is an error.
pub const PROBABILITY_CLAMP_TOL: f64 = 1e-9;

/// Minimum eigenvalue below which an evolved state is rejected.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Correlation weight μ ∈ [0, 1] between consecutive channel uses.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CorrelationStrength(f64);

impl CorrelationStrength {
    pub fn new(mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(QslError::ParamOutOfRange {
                name: "mu",
                value: mu,
                reason: "correlation strength must lie in [0, 1]",
            });
        }
        Ok(Self(mu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CorrelationStrength {
    type Error = QslError;
    fn try_from(mu: f64) -> Result<Self> {
        Self::new(mu)
    }
}

impl From<CorrelationStrength> for f64 {
    fn from(mu: CorrelationStrength) -> f64 {
        mu.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelFamily {
    /// Random-telegraph (colored) pure dephasing; unital.
    Dephasing,
    /// Zero-temperature amplitude damping with a Lorentzian spectral density.
    AmplitudeDamping,
    /// Squeezed generalized amplitude damping (GAD when m = 0).
    Sgad,
}

impl ChannelFamily {
    pub fn label(self) -> &'static str {
        match self {
            ChannelFamily::Dephasing => "dephasing",
            ChannelFamily::AmplitudeDamping => "ad",
            ChannelFamily::Sgad => "sgad",
        }
    }
}

/// Physical parameters of one channel family; the variant fixes the family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ChannelParams {
    Dephasing(DephasingParams),
    #[serde(rename = "ad")]
    AmplitudeDamping(ADParams),
    Sgad(SGADParams),
}

impl ChannelParams {
    pub fn family(&self) -> ChannelFamily {
        match self {
            ChannelParams::Dephasing(_) => ChannelFamily::Dephasing,
            ChannelParams::AmplitudeDamping(_) => ChannelFamily::AmplitudeDamping,
            ChannelParams::Sgad(_) => ChannelFamily::Sgad,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelParams::Dephasing(p) => p.validate(),
            ChannelParams::AmplitudeDamping(p) => p.validate(),
            ChannelParams::Sgad(p) => p.validate(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub params: ChannelParams,
    pub mu: CorrelationStrength,
}

impl ChannelSpec {
    pub fn new(params: ChannelParams, mu: f64) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            mu: CorrelationStrength::new(mu)?,
        })
    }

    pub fn family(&self) -> ChannelFamily {
        self.params.family()
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.params, mu)
    }
}

/// A linear map on 4×4 matrices at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitMap {
    superop: ComplexMatrix,
    t: f64,
}

impl TwoQubitMap {
    pub(crate) fn from_superop(superop: ComplexMatrix, t: f64) -> Self {
        debug_assert_eq!((superop.rows(), superop.cols()), (16, 16));
        Self { superop, t }
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        &self.superop
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        superop::apply(&self.superop, rho)
    }

    pub fn choi(&self) -> ComplexMatrix {
        choi_matrix(&self.superop)
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        min_choi_eigenvalue(&self.superop)
    }

    pub fn trace_preservation_defect(&self) -> f64 {
        trace_preservation_defect(&self.superop)
    }

    pub fn hermiticity_preservation_defect(&self) -> f64 {
        hermiticity_preservation_defect(&self.superop)
    }
}

/// A superoperator together with its exact time derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct MapJet {
    pub value: ComplexMatrix,
    pub rate: ComplexMatrix,
    pub t: f64,
}

impl MapJet {
    fn from_dual(d: DualMatrix, t: f64) -> Self {
        Self {
            value: d.value,
            rate: d.deriv,
            t,
        }
    }

    pub fn map(&self) -> TwoQubitMap {
        TwoQubitMap::from_superop(self.value.clone(), self.t)
    }

    /// (ρ_t, ρ̇_t) for the given initial state.
    pub fn state_and_rate(&self, rho0: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
        (superop::apply(&self.value, rho0), superop::apply(&self.rate, rho0))
    }

    fn mix(un: &MapJet, co: &MapJet, mu: f64) -> MapJet {
        MapJet {
            value: &un.value.scale_real(1.0 - mu) + &co.value.scale_real(mu),
            rate: &un.rate.scale_real(1.0 - mu) + &co.rate.scale_real(mu),
            t: un.t,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QslError::ParamOutOfRange {
            name: "t",
            value: t,
            reason: "time must be finite and non-negative",
        });
    }
    Ok(())
}

/// Clamps a probability within [`PROBABILITY_CLAMP_TOL`] of [0, 1]; errors beyond it.
pub(crate) fn clamp_probability(name: &'static str, value: f64) -> Result<f64> {
    if value < -PROBABILITY_CLAMP_TOL || value > 1.0 + PROBABILITY_CLAMP_TOL || value.is_nan() {
        return Err(QslError::ProbabilityOutOfRange { name, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

fn single_qubit_action(params: &ChannelParams, t: Dual) -> Result<superop::Action> {
    match params {
        ChannelParams::Dephasing(p) => Ok(dephasing::single_qubit_action(p, t)),
        ChannelParams::AmplitudeDamping(p) => amplitude_damping::single_qubit_action(p, t),
        ChannelParams::Sgad(p) => Ok(sgad::single_qubit_action(p, t)),
    }
}

fn uncorrelated_action(params: &ChannelParams, t: Dual) -> Result<superop::Action> {
    match params {
        ChannelParams::Dephasing(p) => Ok(dephasing::uncorrelated_action(p, t)),
        ChannelParams::AmplitudeDamping(p) => amplitude_damping::uncorrelated_action(p, t),
        ChannelParams::Sgad(p) => Ok(sgad::uncorrelated_action(p, t)),
    }
}

fn correlated_action(params: &ChannelParams, t: Dual) -> Result<superop::Action> {
    match params {
        ChannelParams::Dephasing(p) => Ok(dephasing::correlated_action(p, t)),
        ChannelParams::AmplitudeDamping(p) => amplitude_damping::correlated_action(p, t),
        ChannelParams::Sgad(p) => Ok(sgad::correlated_action(p, t)),
    }
}

fn single_qubit_dual(params: &ChannelParams, t: Dual) -> Result<DualMatrix> {
    let a = single_qubit_action(params, t)?;
    Ok(superop::from_action(2, |x| a(x)))
}

fn uncorrelated_dual(params: &ChannelParams, t: Dual) -> Result<DualMatrix> {
    let a = uncorrelated_action(params, t)?;
    Ok(superop::from_action(4, |x| a(x)))
}

fn correlated_dual(params: &ChannelParams, t: Dual) -> Result<DualMatrix> {
    let a = correlated_action(params, t)?;
    Ok(superop::from_action(4, |x| a(x)))
}

/// Single-qubit map as a 4×4 superoperator on vec(2×2).
pub fn single_qubit_map(params: &ChannelParams, t: f64) -> Result<ComplexMatrix> {
    check_time(t)?;
    Ok(single_qubit_dual(params, Dual::variable(t))?.value)
}

/// ε ⊗ ε: independent action on each qubit.
pub fn uncorrelated_two_qubit_map(params: &ChannelParams, t: f64) -> Result<TwoQubitMap> {
    Ok(uncorrelated_jet(params, t)?.map())
}

/// Fully correlated (μ = 1) two-qubit map.
pub fn correlated_two_qubit_map(params: &ChannelParams, t: f64) -> Result<TwoQubitMap> {
    Ok(correlated_jet(params, t)?.map())
}

/// (1−μ)·ε_un + μ·ε_co.
pub fn combined_map(spec: &ChannelSpec, t: f64) -> Result<TwoQubitMap> {
    Ok(combined_jet(spec, t)?.map())
}

pub fn uncorrelated_jet(params: &ChannelParams, t: f64) -> Result<MapJet> {
    check_time(t)?;
    Ok(MapJet::from_dual(uncorrelated_dual(params, Dual::variable(t))?, t))
}

pub fn correlated_jet(params: &ChannelParams, t: f64) -> Result<MapJet> {
    check_time(t)?;
    Ok(MapJet::from_dual(correlated_dual(params, Dual::variable(t))?, t))
}

/// Combined map and its exact time derivative.
pub fn combined_jet(spec: &ChannelSpec, t: f64) -> Result<MapJet> {
    let mu = spec.mu.value();
    // Skip the unused branch at the end points so μ = 0 and μ = 1 are exact.
    if mu == 0.0 {
        return uncorrelated_jet(&spec.params, t);
    }
    if mu == 1.0 {
        return correlated_jet(&spec.params, t);
    }
    let un = uncorrelated_jet(&spec.params, t)?;
    let co = correlated_jet(&spec.params, t)?;
    Ok(MapJet::mix(&un, &co, mu))
}

/// (ρ_t, ρ̇_t) under the combined map, without forming the superoperator.
pub fn combined_state_jet(spec: &ChannelSpec, rho0: &ComplexMatrix, t: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_time(t)?;
    let mu = spec.mu.value();
    let tt = Dual::variable(t);
    let x = DualMatrix::constant(rho0.clone());
    let out = if mu == 0.0 {
        uncorrelated_action(&spec.params, tt)?(&x)
    } else if mu == 1.0 {
        correlated_action(&spec.params, tt)?(&x)
    } else {
        let un = uncorrelated_action(&spec.params, tt)?(&x);
        let co = correlated_action(&spec.params, tt)?(&x);
        un.scale(Dual::constant(1.0 - mu)).add(&co.scale(Dual::constant(mu)))
    };
    Ok((out.value, out.deriv))
}

/// (ρ_t, ρ̇_t) under ε ⊗ ε alone.
pub fn uncorrelated_state_jet(params: &ChannelParams, rho0: &ComplexMatrix, t: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_time(t)?;
    let out = uncorrelated_action(params, Dual::variable(t))?(&DualMatrix::constant(rho0.clone()));
    Ok((out.value, out.deriv))
}

/// ρ_t = ε_t(ρ₀) under the combined map.
pub fn evolve(rho0: &DensityMatrix, spec: &ChannelSpec, t: f64) -> Result<DensityMatrix> {
    finish_state(combined_state_jet(spec, rho0.matrix(), t)?.0)
}

pub(crate) fn finish_state(m: ComplexMatrix) -> Result<DensityMatrix> {
    let m = m.hermitian_part();
    let min = min_eigenvalue(&m)?;
    if min < -POSITIVITY_TOL {
        return Err(QslError::PositivityViolation { min_eigenvalue: min });
    }
    Ok(DensityMatrix::new_unchecked(m))
}
