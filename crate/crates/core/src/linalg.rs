//! Dense complex matrices sized for one- and two-qubit work.
//!
//! Everything here is O(n³) and allocation-light; the largest matrices the
//! crate ever builds are the 16×16 superoperators and Choi matrices of
//! two-qubit maps.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{QslError, Result};

pub type C64 = Complex64;

/// Hermiticity defect tolerated on inputs to the eigensolver.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-9;

/// Off-diagonal Frobenius norm (relative to ‖M‖_F) at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-14;

const JACOBI_MAX_SWEEPS: usize = 64;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(QslError::DimensionMismatch {
                expected: format!("{rows}x{cols} entries"),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Row-major constructor from real entries; panics on a length mismatch.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Matrix unit |i⟩⟨j| of dimension n.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(QslError::DimensionMismatch {
                expected: format!("inner dimension {}", self.cols),
                found: format!("{}", other.rows),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(QslError::DimensionMismatch {
                expected: format!("vector of length {}", self.cols),
                found: format!("{}", v.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |M − M†| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// (M + M†)/2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Largest entrywise difference to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Column-stacking vectorization: `vec[i + rows*j] = M[i, j]`.
    pub fn vectorize(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`vectorize`](Self::vectorize) for an n×n matrix.
    pub fn unvectorize(v: &[C64], n: usize) -> Self {
        assert_eq!(v.len(), n * n);
        Self::from_fn(n, n, |i, j| v[i + n * j])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a dimension mismatch; use [`ComplexMatrix::matmul`] for the fallible form.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product: `out[i*B.rows + k, j*B.cols + l] = A[i,j]·B[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// tr(AB) without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if !a.is_square() || a.rows != b.cols || a.cols != b.rows {
        return Err(QslError::DimensionMismatch {
            expected: format!("{}x{} partner for {}x{}", a.cols, a.rows, a.rows, a.cols),
            found: format!("{}x{}", b.rows, b.cols),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.rows {
        for j in 0..a.cols {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigResult {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigResult {
    /// V diag(λ) V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj())
                .sum()
        })
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigResult> {
    let (values, vectors) = jacobi(m, true)?;
    Ok(EigResult {
        eigenvalues: values,
        eigenvectors: vectors.expect("eigenvectors requested"),
    })
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(m, false)?.0)
}

/// Singular values of a Hermitian matrix, i.e. |λ| sorted descending.
pub fn singular_values_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut sv: Vec<f64> = hermitian_eigenvalues(m)?.into_iter().map(f64::abs).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    if !m.is_square() {
        return Err(QslError::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", m.rows, m.cols),
        });
    }
    let defect = m.hermiticity_defect();
    if !(defect <= HERMITIAN_INPUT_TOL) {
        return Err(QslError::NonHermitianInput { defect });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, v.as_mut(), p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]));
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Hermitian Jacobi rotation annihilating a[p,q]; A ← J† A J, V ← V J.
fn rotate(a: &mut ComplexMatrix, v: Option<&mut ComplexMatrix>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    // Phase so that the (p,q) entry becomes real and positive, then a real rotation.
    let phase = apq / g;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // J = [[c, s], [-s·conj(e), c·conj(e)]] on the (p,q) plane.
    let jpp = C64::new(cs, 0.0);
    let jpq = C64::new(sn, 0.0);
    let jqp = -phase.conj() * sn;
    let jqq = phase.conj() * cs;

    let n = a.rows;
    // A ← A J (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A ← J† A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * jpp + vkq * jqp;
            v[(k, q)] = vkp * jpq + vkq * jqq;
        }
    }
}

/// Single-qubit operators in the computational basis (|0⟩, |1⟩).
pub mod pauli {
    use super::{c, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
            .expect("2x2")
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    /// σ₊ = (σ₁ + iσ₂)/2 = |0⟩⟨1|.
    pub fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }

    /// σ₋ = (σ₁ − iσ₂)/2 = |1⟩⟨0|.
    pub fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kron_identities() {
        let i4 = kron(&identity(), &identity());
        assert_eq!(i4, ComplexMatrix::identity(4));
        let zz = kron(&sigma_z(), &sigma_z());
        assert_eq!(zz, ComplexMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_raising_is_single_unit() {
        let pp = kron(&sigma_plus(), &sigma_plus());
        assert_eq!(pp, ComplexMatrix::unit(4, 0, 3));
    }

    #[test]
    fn sigma_plus_from_paulis() {
        let built = (&sigma_x() + &sigma_y().scale(c(0.0, 1.0))).scale_real(0.5);
        assert!(built.max_abs_diff(&sigma_plus()) < 1e-15);
    }

    #[test]
    fn eig_of_identity_and_pauli() {
        let e = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);
        let e = hermitian_eig(&sigma_x()).unwrap();
        assert!(close(e.eigenvalues[0], 1.0, 1e-14));
        assert!(close(e.eigenvalues[1], -1.0, 1e-14));
    }

    #[test]
    fn eig_of_complex_hermitian() {
        let sy = sigma_y();
        let e = hermitian_eig(&sy).unwrap();
        assert!(close(e.eigenvalues[0], 1.0, 1e-14));
        assert!(e.reconstruct().max_abs_diff(&sy) < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&m), Err(QslError::NonHermitianInput { .. })));
    }

    #[test]
    fn eig_of_zero_matrix() {
        let sv = singular_values_hermitian(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert_eq!(sv, vec![0.0; 4]);
    }

    #[test]
    fn singular_values_of_pauli_z() {
        assert_eq!(singular_values_hermitian(&sigma_z()).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn trace_product_basics() {
        let v = trace_product(&sigma_x(), &sigma_z()).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        let err = trace_product(&sigma_x(), &ComplexMatrix::identity(4));
        assert!(matches!(err, Err(QslError::DimensionMismatch { .. })));
    }

    #[test]
    fn vectorize_is_column_stacking() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let v: Vec<f64> = m.vectorize().iter().map(|z| z.re).collect();
        assert_eq!(v, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(ComplexMatrix::unvectorize(&m.vectorize(), 2), m);
    }

    #[test]
    fn from_row_major_checks_length() {
        assert!(ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }
}
