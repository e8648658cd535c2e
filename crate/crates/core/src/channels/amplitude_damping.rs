//! Amplitude damping into a zero-temperature Lorentzian reservoir.
//!
//! Basis state |0⟩ is the excited level: A₁ = √p_t |1⟩⟨0|.
//! The excited-state amplitude is
//! G(t) = e^{−λt/2}[cosh(dt/2) + (λ/d) sinh(dt/2)], d = √(λ² − 2γ₀λ),
//! and p_t = 1 − G(t)². For λ < 2γ₀, d is imaginary and G oscillates
//! (non-Markovian revivals); (λ/d)·sinh(dt/2) is evaluated as
//! (λt/2)·sinhc(dt/2) so λ = 2γ₀ (d = 0) needs no special case.

use serde::{Deserialize, Serialize};

use crate::channels::clamp_probability;
use crate::channels::superop::{self, Action};
use crate::dual::{Dual, DualMatrix};
use crate::error::{QslError, Result};
use crate::linalg::{kron, ComplexMatrix, C64};

/// Below this modulus the decay-rate denominator is treated as a pole.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ADParams {
    /// Spectral width λ (inverse time).
    pub lambda: f64,
    /// Coupling γ₀ (inverse time).
    pub gamma0: f64,
}

impl ADParams {
    pub fn new(lambda: f64, gamma0: f64) -> Result<Self> {
        let p = Self { lambda, gamma0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(QslError::ParamOutOfRange {
                name: "lambda",
                value: self.lambda,
                reason: "must be positive",
            });
        }
        if !(self.gamma0 > 0.0) || !self.gamma0.is_finite() {
            return Err(QslError::ParamOutOfRange {
                name: "gamma0",
                value: self.gamma0,
                reason: "must be positive",
            });
        }
        Ok(())
    }

    /// d = √(λ² − 2γ₀λ), complex.
    pub fn d(&self) -> C64 {
        C64::new(self.lambda * self.lambda - 2.0 * self.gamma0 * self.lambda, 0.0).sqrt()
    }

    pub fn is_non_markovian(&self) -> bool {
        self.lambda < 2.0 * self.gamma0
    }
}

/// cosh(dt/2) and (λt/2)·sinhc(dt/2) as duals.
fn hyperbolic_pair(params: &ADParams, t: Dual) -> (Dual, Dual) {
    let y = (t * 0.5).scale(params.d());
    (y.cosh(), t * (params.lambda / 2.0) * y.sinhc())
}

/// Signed excited-state amplitude G(t).
pub(crate) fn amplitude_dual(params: &ADParams, t: Dual) -> Dual {
    let d = params.d();
    let lambda = params.lambda;
    if (d * (t.re() / 2.0)).norm() < 1.0 {
        let (ch, sh) = hyperbolic_pair(params, t);
        return ((t * (-lambda / 2.0)).exp() * (ch + sh)).real_part();
    }
    // ½[(1 + λ/d)e^{(d−λ)t/2} + (1 − λ/d)e^{−(d+λ)t/2}] avoids cosh overflow
    let ratio = lambda / d;
    let grow = (t * 0.5).scale(d - lambda).exp();
    let decay = (t * 0.5).scale(-d - lambda).exp();
    (grow.scale((1.0 + ratio) * 0.5) + decay.scale((1.0 - ratio) * 0.5)).real_part()
}

/// G(t) and its closed-form derivative Ġ = −γ₀λ(t/2)e^{−λt/2}·sinhc(dt/2).
pub fn ad_amplitude(t: f64, params: &ADParams) -> (f64, f64) {
    let g = amplitude_dual(params, Dual::constant(t)).re();
    let (d, lambda) = (params.d(), params.lambda);
    let y = d * (t / 2.0);
    let damped_sinhc = if y.norm() < 1e-8 {
        C64::new((t / 2.0) * (-lambda * t / 2.0).exp(), 0.0)
    } else if y.norm() < 1.0 {
        (t / 2.0) * (-lambda * t / 2.0).exp() * y.sinh() / y
    } else {
        (((d - lambda) * (t / 2.0)).exp() - ((-d - lambda) * (t / 2.0)).exp()) / (2.0 * d)
    };
    (g, (-params.gamma0 * lambda * damped_sinhc).re)
}

/// p_t = 1 − e^{−λt}[cosh(dt/2) + (λ/d) sinh(dt/2)]².
pub fn ad_probability(t: f64, params: &ADParams) -> Result<f64> {
    let g = amplitude_dual(params, Dual::constant(t)).re();
    clamp_probability("p_t", 1.0 - g * g)
}

/// dp/dt in closed form (−2GĠ).
pub fn ad_probability_rate(t: f64, params: &ADParams) -> f64 {
    let (g, dg) = ad_amplitude(t, params);
    -2.0 * g * dg
}

/// γ_t = 2γ₀λ sinh(dt/2) / (d cosh(dt/2) + λ sinh(dt/2)).
///
/// Numerator and denominator are divided by d before evaluation, so the
/// pole test applies to cosh(dt/2) + (λ/d) sinh(dt/2) = G(t)·e^{λt/2}.
pub fn ad_rate(t: f64, params: &ADParams) -> Result<f64> {
    let d = params.d();
    let y = d * (t / 2.0);
    if y.re > 20.0 {
        // Both sides divided by e^{y}; the denominator is then ≥ ½, no pole.
        let e2 = (-2.0 * y).exp();
        let ratio = params.lambda / d;
        let num = ratio * (1.0 - e2) * params.gamma0;
        let den = (1.0 + e2) * 0.5 + ratio * (1.0 - e2) * 0.5;
        return Ok((num / den).re);
    }
    let (ch, sh) = hyperbolic_pair(params, Dual::constant(t));
    let denominator = ch.value + sh.value;
    if denominator.norm() < POLE_TOL {
        return Err(QslError::PoleEncountered {
            t,
            denominator: denominator.norm(),
        });
    }
    Ok((sh.value * (2.0 * params.gamma0) / denominator).re)
}

fn ground_from_excited() -> ComplexMatrix {
    ComplexMatrix::unit(2, 1, 0)
}

/// Probability p_t as a dual, validated against [0, 1].
fn probability_dual(params: &ADParams, t: Dual) -> Result<(Dual, Dual)> {
    let g = amplitude_dual(params, t);
    let p = 1.0 - g * g;
    let clamped = clamp_probability("p_t", p.re())?;
    let p = Dual {
        value: C64::new(clamped, 0.0),
        deriv: p.deriv,
    };
    // √(1−p_t) = |G|; the sign of G only affects coherences with the excited level.
    Ok((p, g.abs_real()))
}

fn a0(sqrt_survival: Dual) -> DualMatrix {
    let mut m = DualMatrix::constant(ComplexMatrix::identity(2));
    m.set(0, 0, sqrt_survival);
    m
}

pub(crate) fn single_qubit_action(params: &ADParams, t: Dual) -> Result<Action> {
    let (p, keep) = probability_dual(params, t)?;
    Ok(superop::kraus_action(vec![
        (Dual::one(), a0(keep)),
        (p, DualMatrix::constant(ground_from_excited())),
    ]))
}

/// E_ij = A_i ⊗ A_j, with the √p_t factors of A₁ carried as weights.
pub(crate) fn uncorrelated_action(params: &ADParams, t: Dual) -> Result<Action> {
    let (p, keep) = probability_dual(params, t)?;
    let ops = [(Dual::one(), a0(keep)), (p, DualMatrix::constant(ground_from_excited()))];
    let mut terms = Vec::with_capacity(4);
    for (wi, ai) in &ops {
        for (wj, aj) in &ops {
            terms.push((*wi * *wj, ai.kron(aj)));
        }
    }
    Ok(superop::kraus_action(terms))
}

/// A₀₀ = diag(√(1−p), 1, 1, 1), A₁₁ = √p |11⟩⟨00|.
pub(crate) fn correlated_action(params: &ADParams, t: Dual) -> Result<Action> {
    let (p, keep) = probability_dual(params, t)?;
    let mut a00 = DualMatrix::constant(ComplexMatrix::identity(4));
    a00.set(0, 0, keep);
    Ok(superop::kraus_action(vec![
        (Dual::one(), a00),
        (p, DualMatrix::constant(ComplexMatrix::unit(4, 3, 0))),
    ]))
}

/// Single-qubit Kraus pair (A₀, A₁) at time t.
pub fn single_qubit_kraus(params: &ADParams, t: f64) -> Result<[ComplexMatrix; 2]> {
    let p = ad_probability(t, params)?;
    let a0 = ComplexMatrix::diag_real(&[(1.0 - p).sqrt(), 1.0]);
    let a1 = ground_from_excited().scale_real(p.sqrt());
    Ok([a0, a1])
}

/// Two-qubit Kraus sets: (uncorrelated {A_i⊗A_j}, correlated {A₀₀, A₁₁}).
pub fn two_qubit_kraus(params: &ADParams, t: f64) -> Result<(Vec<ComplexMatrix>, Vec<ComplexMatrix>)> {
    let [a0, a1] = single_qubit_kraus(params, t)?;
    let single = [a0, a1];
    let un = single
        .iter()
        .flat_map(|a| single.iter().map(move |b| kron(a, b)))
        .collect();
    let p = ad_probability(t, params)?;
    let mut a00 = ComplexMatrix::identity(4);
    a00[(0, 0)] = C64::new((1.0 - p).sqrt(), 0.0);
    let a11 = ComplexMatrix::unit(4, 3, 0).scale_real(p.sqrt());
    Ok((un, vec![a00, a11]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn markov() -> ADParams {
        ADParams::new(2.0, 1.0).unwrap()
    }

    fn non_markov() -> ADParams {
        ADParams::new(0.2, 1.0).unwrap()
    }

    #[test]
    fn probability_starts_at_zero() {
        for p in [markov(), non_markov(), ADParams::new(5.0, 1.0).unwrap()] {
            assert!(ad_probability(0.0, &p).unwrap().abs() < 1e-15);
            assert!(ad_rate(0.0, &p).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn critical_damping_closed_form() {
        // d = 0: p_t = 1 − e^{−λt}(1 + λt/2)²
        let p = markov();
        let mut last = 0.0;
        for k in 1..50 {
            let t = 0.2 * k as f64;
            let want = 1.0 - (-2.0 * t).exp() * (1.0 + t).powi(2);
            let got = ad_probability(t, &p).unwrap();
            assert!((got - want).abs() < 1e-14, "t = {t}");
            assert!(got >= last);
            last = got;
        }
        assert!(last > 0.999);
    }

    #[test]
    fn non_markovian_probability_revives() {
        let p = non_markov();
        let dabs = (2.0f64 * 0.2 - 0.04).sqrt();
        // first zero of cos(|d|t/2) + (λ/|d|) sin(|d|t/2)
        let t_star = 2.0 / dabs * (std::f64::consts::PI - (dabs / 0.2).atan());
        assert!((ad_probability(t_star, &p).unwrap() - 1.0).abs() < 1e-12);
        let before = ad_probability(t_star - 0.5, &p).unwrap();
        let after = ad_probability(t_star + 0.5, &p).unwrap();
        assert!(before < 1.0 && after < 1.0);
        assert!(ad_probability(t_star + 2.0, &p).unwrap() < 0.99);
    }

    #[test]
    fn rate_approaches_markov_limit() {
        // λ ≫ γ₀: γ_t → 2γ₀λ/(λ + d) ≈ γ₀
        let p = ADParams::new(1000.0, 1.0).unwrap();
        let want = 2.0 * 1.0 * 1000.0 / (1000.0 + p.d().re);
        assert!((ad_rate(1.0, &p).unwrap() - want).abs() < 1e-9);
        assert!((want - 1.0).abs() < 2e-3);
    }

    #[test]
    fn rate_has_pole_where_amplitude_vanishes() {
        let p = non_markov();
        let dabs = (0.4f64 - 0.04).sqrt();
        let t_star = 2.0 / dabs * (std::f64::consts::PI - (dabs / 0.2).atan());
        // bisect the amplitude zero for the exact pole instant
        let (mut lo, mut hi) = (t_star - 0.1, t_star + 0.1);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ad_amplitude(mid, &p).0 > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let err = ad_rate(0.5 * (lo + hi), &p);
        assert!(matches!(err, Err(QslError::PoleEncountered { .. })), "{err:?}");
        assert!(ad_rate(t_star - 0.3, &p).unwrap() > 0.0);
    }

    #[test]
    fn rate_is_log_derivative_of_survival() {
        for p in [markov(), non_markov()] {
            for &t in &[0.3, 1.0, 2.5] {
                let p_dot = ad_probability_rate(t, &p);
                let survival = 1.0 - ad_probability(t, &p).unwrap();
                assert!((ad_rate(t, &p).unwrap() - p_dot / survival).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn amplitude_rate_matches_dual() {
        for p in [markov(), non_markov(), ADParams::new(3.0, 0.5).unwrap()] {
            for &t in &[0.0, 0.4, 1.7, 6.0] {
                let d = amplitude_dual(&p, Dual::variable(t)).rate();
                assert!((d - ad_amplitude(t, &p).1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn large_times_stay_finite() {
        let p = ADParams::new(1000.0, 1.0).unwrap();
        // weak coupling: p_t ≈ 1 − e^{−γ₀t}
        assert!((ad_probability(5.0, &p).unwrap() - (1.0 - (-5.0f64).exp())).abs() < 1e-4);
        assert!(ad_rate(5.0, &p).unwrap().is_finite());
        let m = markov();
        assert!((ad_probability(900.0, &m).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ADParams::new(0.0, 1.0).is_err());
        assert!(ADParams::new(1.0, -1.0).is_err());
    }
}
