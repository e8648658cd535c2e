//! Random-telegraph (colored-noise) pure dephasing.
//!
//! Single-qubit Kraus operators √(1−z_t)·I and √z_t·σ_z with
//! z_t = (1 − Λ(t))/2 and memory kernel
//! Λ(t) = e^{−t/2ν}[cos(w t/2ν) + sin(w t/2ν)/w], w = √((4ν)² − 1).
//! For ν < 1/4, w is imaginary and the trigonometric functions turn
//! hyperbolic; both cases go through the same complex arithmetic.

use serde::{Deserialize, Serialize};

use crate::channels::superop::{self, Action};
use crate::dual::{Dual, DualMatrix};
use crate::error::{QslError, Result};
use crate::linalg::{kron, pauli, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingParams {
    pub nu: f64,
}

impl DephasingParams {
    pub fn new(nu: f64) -> Result<Self> {
        let p = Self { nu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(QslError::ParamOutOfRange {
                name: "nu",
                value: self.nu,
                reason: "must be positive",
            });
        }
        Ok(())
    }

    /// Non-Markovian (information back-flow) for ν ≥ 1/4.
    pub fn is_non_markovian(&self) -> bool {
        self.nu >= 0.25
    }

    /// Auxiliary frequency w = √((4ν)² − 1), imaginary for ν < 1/4.
    pub fn w(&self) -> C64 {
        C64::new((4.0 * self.nu).powi(2) - 1.0, 0.0).sqrt()
    }
}

/// Λ(t) as a dual number in t.
pub(crate) fn kernel_dual(params: &DephasingParams, t: Dual) -> Dual {
    let x = t / (2.0 * params.nu);
    let w = params.w();
    if (w * x.re()).norm() < 1.0 {
        // sin(wx)/w = x·sinc(wx) stays finite at w = 0 (ν = 1/4).
        let wx = x.scale(w);
        return ((-x).exp() * (wx.cos() + x * wx.sinc())).real_part();
    }
    // Exponential form: e^{−x}cosh(|w|x) would overflow for large x when w
    // is imaginary, while e^{(−1 ± iw)x} stays bounded.
    let iw = C64::new(0.0, 1.0) * w;
    let plus = x.scale(iw - 1.0).exp();
    let minus = x.scale(-iw - 1.0).exp();
    ((plus + minus) * 0.5 + (plus - minus).scale(1.0 / (2.0 * iw))).real_part()
}

/// (Λ(t), z_t) with z_t = (1 − Λ)/2.
pub fn dephasing_kernel(t: f64, params: &DephasingParams) -> (f64, f64) {
    let lambda = kernel_dual(params, Dual::constant(t)).re();
    (lambda, (1.0 - lambda) / 2.0)
}

/// Closed-form dΛ/dt = −(1 + w²)/(2ν) · x·e^{−x} · sin(wx)/(wx), x = t/2ν.
pub fn dephasing_kernel_rate(t: f64, params: &DephasingParams) -> f64 {
    let x = t / (2.0 * params.nu);
    let w = params.w();
    let wx = w * x;
    // x·e^{−x}·sinc(wx), written with bounded exponentials once |wx| ≥ 1
    let damped = if wx.norm() < 1e-8 {
        C64::new(x * (-x).exp(), 0.0)
    } else if wx.norm() < 1.0 {
        (-x).exp() * x * wx.sin() / wx
    } else {
        let iw = C64::new(0.0, 1.0) * w;
        (((iw - 1.0) * x).exp() - ((-iw - 1.0) * x).exp()) / (2.0 * iw)
    };
    let one_plus_w2 = 16.0 * params.nu * params.nu;
    (-(one_plus_w2 / (2.0 * params.nu)) * damped).re
}

/// z_t as a dual.
fn flip_probability(params: &DephasingParams, t: Dual) -> Dual {
    (1.0 - kernel_dual(params, t)) * 0.5
}

pub(crate) fn single_qubit_action(params: &DephasingParams, t: Dual) -> Action {
    let z = flip_probability(params, t);
    superop::kraus_action(vec![
        (1.0 - z, DualMatrix::constant(pauli::identity())),
        (z, DualMatrix::constant(pauli::sigma_z())),
    ])
}

/// Kraus set {√(P_i P_j) σ_i⊗σ_j : i, j ∈ {0, 3}}.
pub(crate) fn uncorrelated_action(params: &DephasingParams, t: Dual) -> Action {
    let z = flip_probability(params, t);
    let probs = [1.0 - z, z];
    let ops = [pauli::identity(), pauli::sigma_z()];
    let mut terms = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            terms.push((probs[i] * probs[j], DualMatrix::constant(kron(&ops[i], &ops[j]))));
        }
    }
    superop::kraus_action(terms)
}

/// Kraus set {√P_k σ_k⊗σ_k : k ∈ {0, 3}}.
pub(crate) fn correlated_action(params: &DephasingParams, t: Dual) -> Action {
    let z = flip_probability(params, t);
    superop::kraus_action(vec![
        (1.0 - z, DualMatrix::constant(ComplexMatrix::identity(4))),
        (z, DualMatrix::constant(kron(&pauli::sigma_z(), &pauli::sigma_z()))),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_at_zero() {
        for &nu in &[0.05, 0.25, 1.0, 3.0] {
            let (l, z) = dephasing_kernel(0.0, &DephasingParams::new(nu).unwrap());
            assert!((l - 1.0).abs() < 1e-15);
            assert!(z.abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_decays_to_half_flip() {
        for &nu in &[0.1, 1.0] {
            let (l, z) = dephasing_kernel(400.0, &DephasingParams::new(nu).unwrap());
            assert!(l.abs() < 1e-12);
            assert!((z - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_non_markovian_value() {
        let p = DephasingParams::new(1.0).unwrap();
        let s15 = 15f64.sqrt();
        let want = (-0.5f64).exp() * ((s15 / 2.0).cos() + (s15 / 2.0).sin() / s15);
        let (l, z) = dephasing_kernel(1.0, &p);
        assert!((l - want).abs() < 1e-14);
        assert!((z - (1.0 - want) / 2.0).abs() < 1e-14);
        // Λ changes sign (back-flow) for ν = 1
        assert!(dephasing_kernel(2.0, &p).0 < 0.0);
    }

    #[test]
    fn kernel_markovian_uses_hyperbolic_form() {
        let p = DephasingParams::new(0.1).unwrap();
        let k = (1.0f64 - 0.16).sqrt();
        let x: f64 = 1.0 / 0.2;
        let want = (-x).exp() * ((k * x).cosh() + (k * x).sinh() / k);
        assert!((dephasing_kernel(1.0, &p).0 - want).abs() < 1e-13);
    }

    #[test]
    fn kernel_continuous_at_critical_nu() {
        let t = 0.9;
        let at = dephasing_kernel(t, &DephasingParams::new(0.25).unwrap()).0;
        // w = 0: Λ = e^{−x}(1 + x)
        let x = t / 0.5;
        assert!((at - (-x as f64).exp() * (1.0 + x)).abs() < 1e-14);
        let near = dephasing_kernel(t, &DephasingParams::new(0.25 + 1e-9).unwrap()).0;
        assert!((at - near).abs() < 1e-7);
    }

    #[test]
    fn kernel_rate_matches_dual() {
        for &nu in &[0.1, 0.25, 1.0] {
            let p = DephasingParams::new(nu).unwrap();
            for &t in &[0.0, 0.3, 1.0, 2.5] {
                let d = kernel_dual(&p, Dual::variable(t)).rate();
                assert!((d - dephasing_kernel_rate(t, &p)).abs() < 1e-12, "nu={nu} t={t}");
            }
        }
    }

    #[test]
    fn single_qubit_coherence_scales_with_kernel() {
        let p = DephasingParams::new(1.0).unwrap();
        let action = single_qubit_action(&p, Dual::constant(0.7));
        let s = superop::from_action(2, |x| action(x)).value;
        let (l, _) = dephasing_kernel(0.7, &p);
        // vec index 2 is the (0,1) entry
        assert!((s[(2, 2)].re - l).abs() < 1e-15);
        assert!((s[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_nu() {
        assert!(DephasingParams::new(0.0).is_err());
        assert!(DephasingParams::new(-1.0).is_err());
        assert!(!DephasingParams::new(0.1).unwrap().is_non_markovian());
        assert!(DephasingParams::new(0.25).unwrap().is_non_markovian());
    }
}
