//! Forward-mode dual numbers over the complex field.
//!
//! Channel maps are closed-form functions of time. Evaluating those closed
//! forms on a [`Dual`] seeded with `dt/dt = 1` yields every map entry together
//! with its exact time derivative, which is what the speed-limit integrands
//! need (ρ̇ = L_t(ρ_t)).

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::linalg::{ComplexMatrix, C64};

/// Series cut-over for sinh(y)/y and sin(y)/y.
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub value: C64,
    pub deriv: C64,
}

impl Dual {
    pub fn constant(value: f64) -> Self {
        Self {
            value: C64::new(value, 0.0),
            deriv: C64::new(0.0, 0.0),
        }
    }

    pub fn complex_constant(value: C64) -> Self {
        Self {
            value,
            deriv: C64::new(0.0, 0.0),
        }
    }

    /// The independent variable t itself.
    pub fn variable(t: f64) -> Self {
        Self {
            value: C64::new(t, 0.0),
            deriv: C64::new(1.0, 0.0),
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn re(self) -> f64 {
        self.value.re
    }

    pub fn rate(self) -> f64 {
        self.deriv.re
    }

    /// Keeps only the real parts of value and derivative.
    pub fn real_part(self) -> Self {
        Self {
            value: C64::new(self.value.re, 0.0),
            deriv: C64::new(self.deriv.re, 0.0),
        }
    }

    pub fn scale(self, s: C64) -> Self {
        Self {
            value: self.value * s,
            deriv: self.deriv * s,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self {
            value: e,
            deriv: e * self.deriv,
        }
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        Self {
            value: s,
            deriv: self.deriv / (s * 2.0),
        }
    }

    pub fn cos(self) -> Self {
        Self {
            value: self.value.cos(),
            deriv: -self.value.sin() * self.deriv,
        }
    }

    pub fn sin(self) -> Self {
        Self {
            value: self.value.sin(),
            deriv: self.value.cos() * self.deriv,
        }
    }

    pub fn cosh(self) -> Self {
        Self {
            value: self.value.cosh(),
            deriv: self.value.sinh() * self.deriv,
        }
    }

    pub fn sinh(self) -> Self {
        Self {
            value: self.value.sinh(),
            deriv: self.value.cosh() * self.deriv,
        }
    }

    /// sinh(y)/y, analytic through y = 0.
    pub fn sinhc(self) -> Self {
        let y = self.value;
        let (f, df) = if y.norm() < SERIES_CUTOFF {
            let y2 = y * y;
            (1.0 + y2 / 6.0 + y2 * y2 / 120.0, y / 3.0 + y * y2 / 30.0)
        } else {
            let sh = y.sinh();
            (sh / y, (y * y.cosh() - sh) / (y * y))
        };
        Self {
            value: f,
            deriv: df * self.deriv,
        }
    }

    /// sin(y)/y, analytic through y = 0.
    pub fn sinc(self) -> Self {
        let y = self.value;
        let (f, df) = if y.norm() < SERIES_CUTOFF {
            let y2 = y * y;
            (1.0 - y2 / 6.0 + y2 * y2 / 120.0, -y / 3.0 + y * y2 / 30.0)
        } else {
            let s = y.sin();
            (s / y, (y * y.cos() - s) / (y * y))
        };
        Self {
            value: f,
            deriv: df * self.deriv,
        }
    }

    /// |x| for a real-valued dual; the derivative takes the sign of the value.
    pub fn abs_real(self) -> Self {
        if self.value.re < 0.0 {
            -self.real_part()
        } else {
            self.real_part()
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value + rhs.value,
            deriv: self.deriv + rhs.deriv,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value - rhs.value,
            deriv: self.deriv - rhs.deriv,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value * rhs.value,
            deriv: self.deriv * rhs.value + self.value * rhs.deriv,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let v = self.value / rhs.value;
        Dual {
            value: v,
            deriv: (self.deriv - v * rhs.deriv) / rhs.value,
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            value: -self.value,
            deriv: -self.deriv,
        }
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, rhs: f64) -> Dual {
        Dual {
            value: self.value + rhs,
            deriv: self.deriv,
        }
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    fn sub(self, rhs: f64) -> Dual {
        Dual {
            value: self.value - rhs,
            deriv: self.deriv,
        }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, rhs: f64) -> Dual {
        Dual {
            value: self.value * rhs,
            deriv: self.deriv * rhs,
        }
    }
}

impl Div<f64> for Dual {
    type Output = Dual;
    fn div(self, rhs: f64) -> Dual {
        Dual {
            value: self.value / rhs,
            deriv: self.deriv / rhs,
        }
    }
}

impl Sub<Dual> for f64 {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            value: self - rhs.value,
            deriv: -rhs.deriv,
        }
    }
}

impl Mul<Dual> for f64 {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        rhs * self
    }
}

/// A matrix of duals, stored as the value matrix and its derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct DualMatrix {
    pub value: ComplexMatrix,
    pub deriv: ComplexMatrix,
}

impl DualMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            value: ComplexMatrix::zeros(n, n),
            deriv: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn constant(m: ComplexMatrix) -> Self {
        let (r, c) = (m.rows(), m.cols());
        Self {
            value: m,
            deriv: ComplexMatrix::zeros(r, c),
        }
    }

    pub fn dim(&self) -> usize {
        self.value.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> Dual {
        Dual {
            value: self.value[(i, j)],
            deriv: self.deriv[(i, j)],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: Dual) {
        self.value[(i, j)] = x.value;
        self.deriv[(i, j)] = x.deriv;
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            value: &self.value + &other.value,
            deriv: &self.deriv + &other.deriv,
        }
    }

    /// Product with a dual scalar.
    pub fn scale(&self, s: Dual) -> Self {
        Self {
            value: self.value.scale(s.value),
            deriv: &self.deriv.scale(s.value) + &self.value.scale(s.deriv),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            value: self.value.adjoint(),
            deriv: self.deriv.adjoint(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            value: &self.value * &other.value,
            deriv: &(&self.deriv * &other.value) + &(&self.value * &other.deriv),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        use crate::linalg::kron;
        Self {
            value: kron(&self.value, &other.value),
            deriv: &kron(&self.deriv, &other.value) + &kron(&self.value, &other.deriv),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, t: f64) -> f64 {
        let h = 1e-6;
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    #[test]
    fn product_and_quotient_rules() {
        let t = Dual::variable(0.7);
        let f = (t * t + 1.0) / (t.exp() + 2.0);
        let g = |x: f64| (x * x + 1.0) / (x.exp() + 2.0);
        assert!((f.re() - g(0.7)).abs() < 1e-15);
        assert!((f.rate() - fd(g, 0.7)).abs() < 1e-8);
    }

    #[test]
    fn sinhc_is_smooth_through_zero() {
        for &y in &[0.0, 1e-6, 5e-5, 2e-4, 0.3, 2.0] {
            let d = Dual::variable(y).sinhc();
            let want = if y == 0.0 { 1.0 } else { y.sinh() / y };
            assert!((d.re() - want).abs() < 1e-13, "y = {y}");
            // finite differences of sinh(x)/x lose all digits near zero
            let want_rate = if y < 1e-3 { y / 3.0 + y.powi(3) / 30.0 } else { fd(|x| x.sinh() / x, y) };
            assert!((d.rate() - want_rate).abs() < 1e-7, "y = {y}");
        }
    }

    #[test]
    fn sinc_matches_sinhc_on_imaginary_axis() {
        let y = 0.37;
        let a = Dual::complex_constant(C64::new(0.0, y)).sinhc();
        let b = Dual::constant(y).sinc();
        assert!((a.value - b.value).norm() < 1e-15);
    }

    #[test]
    fn abs_real_flips_derivative() {
        let x = Dual::variable(-0.5) * 2.0;
        let a = x.abs_real();
        assert_eq!(a.re(), 1.0);
        assert_eq!(a.rate(), -2.0);
    }
}
