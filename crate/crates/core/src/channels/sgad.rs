//! Squeezed generalized amplitude damping (SGAD).
//!
//! Maps are built from the exact solution of the Lindblad generator
//! rather than from a Kraus decomposition. With
//! p = e^{−Ω(n+½)t}, q = cosh(Ωmt), r = sinh(Ωmt) the single-qubit map is
//!
//! ```text
//! ρ₀₀ ↦ (n·tr ρ + p²((n+1)ρ₀₀ − nρ₁₁)) / (2n+1)
//! ρ₀₁ ↦ p(qρ₀₁ − rρ₁₀)
//! ```
//!
//! The correlated two-qubit map acts as the same two-level process on the
//! pair |00⟩, |11⟩, damps coherences between that pair and |01⟩, |10⟩ by
//! √s = e^{−Ω(n+1)t/2} (from |00⟩) and √u = e^{−Ωnt/2} (from |11⟩), and
//! leaves the |01⟩, |10⟩ block untouched.

use serde::{Deserialize, Serialize};

use crate::channels::superop::{self, Action};
use crate::dual::{Dual, DualMatrix};
use crate::error::{QslError, Result};
use crate::linalg::{ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SGADParams {
    /// Thermal photon number n ≥ 0.
    pub n: f64,
    /// Squeezing m ≥ 0, with m < n + ½.
    pub m: f64,
    /// Dissipation rate Ω > 0.
    pub omega: f64,
}

impl SGADParams {
    pub fn new(n: f64, m: f64, omega: f64) -> Result<Self> {
        let p = Self { n, m, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 0.0) || !self.n.is_finite() {
            return Err(QslError::ParamOutOfRange {
                name: "n",
                value: self.n,
                reason: "must be non-negative",
            });
        }
        if !(self.m >= 0.0) || !(self.m < self.n + 0.5) {
            return Err(QslError::ParamOutOfRange {
                name: "m",
                value: self.m,
                reason: "must satisfy 0 <= m < n + 1/2",
            });
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(QslError::ParamOutOfRange {
                name: "omega",
                value: self.omega,
                reason: "must be positive",
            });
        }
        Ok(())
    }

    /// Generator eigenvalues η₁..η₄.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let (n, m, w) = (self.n, self.m, self.omega);
        [0.0, -w * (n + m + 0.5), -w * (n - m + 0.5), -2.0 * w * (n + 0.5)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgadScalars {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub u: f64,
    pub s: f64,
}

struct DualScalars {
    p: Dual,
    q: Dual,
    r: Dual,
    u: Dual,
    s: Dual,
}

fn scalars_dual(params: &SGADParams, t: Dual) -> DualScalars {
    let SGADParams { n, m, omega } = *params;
    let mt = t * (omega * m);
    DualScalars {
        p: (t * (-omega * (n + 0.5))).exp(),
        q: mt.cosh(),
        r: mt.sinh(),
        u: (t * (-omega * n)).exp(),
        s: (t * (-omega * (n + 1.0))).exp(),
    }
}

pub fn sgad_scalars(t: f64, params: &SGADParams) -> SgadScalars {
    let d = scalars_dual(params, Dual::constant(t));
    SgadScalars {
        p: d.p.re(),
        q: d.q.re(),
        r: d.r.re(),
        u: d.u.re(),
        s: d.s.re(),
    }
}

/// Two-level thermal relaxation between `hi` and `lo` plus the squeezing
/// coupling of the coherences between them.
fn two_level_block(n: f64, sc: &DualScalars, x: &DualMatrix, y: &mut DualMatrix, hi: usize, lo: usize) {
    let (xh, xl) = (x.get(hi, hi), x.get(lo, lo));
    let p2 = sc.p * sc.p;
    let yh = (n * (xh + xl) + p2 * ((n + 1.0) * xh - n * xl)) / (2.0 * n + 1.0);
    y.set(hi, hi, yh);
    y.set(lo, lo, xh + xl - yh);
    let (xhl, xlh) = (x.get(hi, lo), x.get(lo, hi));
    y.set(hi, lo, sc.p * (sc.q * xhl - sc.r * xlh));
    y.set(lo, hi, sc.p * (sc.q * xlh - sc.r * xhl));
}

pub(crate) fn single_qubit_action(params: &SGADParams, t: Dual) -> Action {
    let sc = scalars_dual(params, t);
    let n = params.n;
    Box::new(move |x| {
        let mut y = DualMatrix::zeros(2);
        two_level_block(n, &sc, x, &mut y, 0, 1);
        y
    })
}

pub(crate) fn uncorrelated_action(params: &SGADParams, t: Dual) -> Action {
    superop::local_tensor_action(single_qubit_action(params, t), single_qubit_action(params, t))
}

pub(crate) fn correlated_action(params: &SGADParams, t: Dual) -> Action {
    let sc = scalars_dual(params, t);
    let (rs, ru) = (sc.s.sqrt(), sc.u.sqrt());
    let n = params.n;
    Box::new(move |x| {
        let mut y = x.clone();
        two_level_block(n, &sc, x, &mut y, 0, 3);
        for k in [1, 2] {
            y.set(0, k, rs * x.get(0, k));
            y.set(k, 0, rs * x.get(k, 0));
            y.set(k, 3, ru * x.get(k, 3));
            y.set(3, k, ru * x.get(3, k));
        }
        y
    })
}

/// The correlated two-qubit solution in its published closed form, kept
/// only to report how far it sits from the generator solution.
pub fn printed_correlated_state(rho: &ComplexMatrix, params: &SGADParams, t: f64) -> ComplexMatrix {
    let SgadScalars { p, q, r, u, s } = sgad_scalars(t, params);
    let n = params.n;
    let x = |i: usize, j: usize| rho[(i, j)];
    let mut y = rho.clone();
    let y00 = (x(0, 0) * ((n + 1.0) * p * p - (2.0 * n + 1.0) * s * (1.0 - u) + n)
        + x(3, 3) * (n - p * (n * p + 2.0 * (2.0 * n + 1.0) * r)))
        / (2.0 * n + 1.0);
    y[(0, 0)] = y00;
    let su = (s * u).sqrt();
    for k in [1, 2] {
        y[(0, k)] = x(0, k) * su;
        y[(k, 0)] = x(k, 0) * su;
        y[(k, 3)] = x(k, 3) * u.sqrt();
        y[(3, k)] = x(3, k) * u.sqrt();
    }
    let c = s.sqrt() * u - p * (1.0 - q);
    y[(0, 3)] = x(0, 3) * c - x(3, 0) * (p * r);
    y[(3, 0)] = x(3, 0) * c - x(0, 3) * (p * r);
    y[(3, 3)] = C64::new(1.0, 0.0) - y00 - x(1, 1) - x(2, 2);
    y
}

fn csqrt(x: f64) -> C64 {
    C64::new(x, 0.0).sqrt()
}

/// The published single-qubit operator-sum set, radicands taken as complex
/// square roots so a negative radicand shows up in the completeness defect.
pub fn printed_single_qubit_kraus(params: &SGADParams, t: f64) -> Vec<ComplexMatrix> {
    let SgadScalars { p, q, r, .. } = sgad_scalars(t, params);
    let n = params.n;
    let k = 2.0 * n + 1.0;
    let zero = C64::new(0.0, 0.0);
    let m2 = |a: C64, b: C64, c: C64, d: C64| ComplexMatrix::from_fn(2, 2, |i, j| [[a, b], [c, d]][i][j]);
    vec![
        m2(csqrt(n / k + (n + 1.0) / k * p * p - p * q), zero, zero, zero),
        m2(zero, zero, csqrt((n + 1.0) / k * (1.0 - p * p) - p * r), zero),
        m2(zero, zero, zero, csqrt((n + 1.0) / k + n / k * p * p - p * r)),
        m2(csqrt(p * q), zero, zero, csqrt(p * q)),
        m2(zero, csqrt(p * r), csqrt(p * r), zero),
        m2(zero, csqrt(n / k * (1.0 - p * p) - p * r), zero, zero),
    ]
}

/// The published correlated two-qubit operator-sum set (seven operators).
pub fn printed_correlated_kraus(params: &SGADParams, t: f64) -> Vec<ComplexMatrix> {
    let SgadScalars { p, q, r, u, s } = sgad_scalars(t, params);
    let n = params.n;
    let k = 2.0 * n + 1.0;
    let single = |i: usize, j: usize, v: C64| {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(i, j)] = v;
        m
    };
    let mut e11 = ComplexMatrix::identity(4);
    e11[(0, 0)] = csqrt(s);
    e11[(3, 3)] = csqrt(u);
    let mut e66 = ComplexMatrix::zeros(4, 4);
    e66[(0, 0)] = csqrt(p * q - 1.0);
    e66[(3, 3)] = csqrt(p * q - 1.0);
    let mut e77 = ComplexMatrix::zeros(4, 4);
    let i_pr = C64::new(0.0, 1.0) * csqrt(p * r);
    e77[(0, 3)] = i_pr;
    e77[(3, 0)] = i_pr;
    vec![
        e11,
        single(3, 0, csqrt((n + 1.0) / k * (1.0 - p * p) - p * r)),
        single(0, 3, csqrt(n / k * (1.0 - p * p) - p * r)),
        single(0, 0, csqrt(n / k + (n + 1.0) / k * p * p - p * (q - 1.0) - s)),
        single(3, 3, csqrt((n + 1.0) / k + n / k * p * p - p * (q - 1.0) - u)),
        e66,
        e77,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::superop::{apply, from_action, min_choi_eigenvalue, trace_preservation_defect};

    fn single_qubit_superop(p: &SGADParams, t: Dual) -> DualMatrix {
        let a = single_qubit_action(p, t);
        from_action(2, |x| a(x))
    }

    fn correlated_superop(p: &SGADParams, t: Dual) -> DualMatrix {
        let a = correlated_action(p, t);
        from_action(4, |x| a(x))
    }

    #[test]
    fn scalars_at_zero_and_without_squeezing() {
        let p = SGADParams::new(1.0, 1.0, 1.0).unwrap();
        let s = sgad_scalars(0.0, &p);
        assert_eq!((s.p, s.q, s.r, s.u, s.s), (1.0, 1.0, 0.0, 1.0, 1.0));
        let g = SGADParams::new(1.0, 0.0, 1.0).unwrap();
        let s = sgad_scalars(3.0, &g);
        assert_eq!((s.q, s.r), (1.0, 0.0));
    }

    #[test]
    fn scalars_reference_values() {
        let s = sgad_scalars(1.0, &SGADParams::new(1.0, 1.0, 1.0).unwrap());
        assert!((s.p - (-1.5f64).exp()).abs() < 1e-15);
        assert!((s.q - 1f64.cosh()).abs() < 1e-15);
        assert!((s.r - 1f64.sinh()).abs() < 1e-15);
        assert!((s.u - (-1f64).exp()).abs() < 1e-15);
        assert!((s.s - (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn steady_state_population() {
        let p = SGADParams::new(2.0, 0.0, 1.0).unwrap();
        let s = single_qubit_superop(&p, Dual::constant(60.0)).value;
        let out = apply(&s, &ComplexMatrix::unit(2, 1, 1));
        assert!((out[(0, 0)].re - 2.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn maps_are_cptp() {
        for (n, m) in [(1.0, 1.0), (1.0, 0.0), (0.0, 0.0), (2.0, 2.4)] {
            let p = SGADParams::new(n, m, 1.0).unwrap();
            for t in [0.3, 1.0, 2.5] {
                let s1 = single_qubit_superop(&p, Dual::constant(t)).value;
                let s2 = correlated_superop(&p, Dual::constant(t)).value;
                assert!(trace_preservation_defect(&s1) < 1e-14);
                assert!(trace_preservation_defect(&s2) < 1e-14);
                assert!(min_choi_eigenvalue(&s1) > -1e-12, "n={n} m={m} t={t}");
                assert!(min_choi_eigenvalue(&s2) > -1e-12, "n={n} m={m} t={t}");
            }
        }
    }

    #[test]
    fn printed_kraus_incomplete_without_noise() {
        let p = SGADParams::new(0.0, 0.0, 1.0).unwrap();
        let ks = printed_single_qubit_kraus(&p, 0.5);
        let mut sum = ComplexMatrix::zeros(2, 2);
        for k in &ks {
            sum = &sum + &(&k.adjoint() * k);
        }
        assert!((&sum - &ComplexMatrix::identity(2)).frobenius_norm() > 1e-3);
    }

    #[test]
    fn printed_correlated_state_deviates_from_generator() {
        let p = SGADParams::new(1.0, 1.0, 1.0).unwrap();
        let rho = ComplexMatrix::diag_real(&[0.4, 0.1, 0.1, 0.4]);
        let exact = apply(&correlated_superop(&p, Dual::constant(1.0)).value, &rho);
        let printed = printed_correlated_state(&rho, &p, 1.0);
        assert!(exact.max_abs_diff(&printed) > 1e-3);
    }

    #[test]
    fn rejects_excess_squeezing() {
        assert!(SGADParams::new(1.0, 1.5, 1.0).is_err());
        assert!(SGADParams::new(-0.1, 0.0, 1.0).is_err());
        assert!(SGADParams::new(1.0, 0.0, 0.0).is_err());
    }
}
