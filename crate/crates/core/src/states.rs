//! Two-qubit density matrices and the Werner-like initial-state family
//! ρ₀ = r|ψ⟩⟨ψ| + (1−r)/4·I with |ψ⟩ = √(1−α²)|01⟩ + α|10⟩.
//!
//! Basis ordering is (|00⟩, |01⟩, |10⟩, |11⟩) throughout the crate. Matrix
//! elements written ρ₂₃ etc. in docs are 1-based labels into that ordering;
//! storage is 0-based, so ρ₂₃ lives at index (1, 2).

use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::linalg::{hermitian_eigenvalues, trace_product, ComplexMatrix, C64};

pub const TRACE_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialStateParams {
    pub r: f64,
    pub alpha: f64,
}

impl InitialStateParams {
    pub fn new(r: f64, alpha: f64) -> Result<Self> {
        let p = Self { r, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.r) {
            return Err(QslError::ParamOutOfRange {
                name: "r",
                value: self.r,
                reason: "must lie in [0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(QslError::ParamOutOfRange {
                name: "alpha",
                value: self.alpha,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }

    /// r = 1/2, α = 1/√2: the state used in every figure.
    pub fn figure_default() -> Self {
        Self {
            r: 0.5,
            alpha: std::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

/// A validated 4×4 density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks unit trace, Hermiticity and positivity (within tolerance).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(QslError::DimensionMismatch {
                expected: "4x4".into(),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        let h = matrix.hermiticity_defect();
        if h > HERMITIAN_TOL {
            return Err(QslError::NonHermitianInput { defect: h });
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(QslError::ParamOutOfRange {
                name: "trace",
                value: tr.re,
                reason: "density matrix must have unit trace",
            });
        }
        let min = min_eigenvalue(&matrix)?;
        if min < -PSD_TOL {
            return Err(QslError::PositivityViolation { min_eigenvalue: min });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix without checks. Callers are responsible for the invariants.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: ComplexMatrix::identity(4).scale_real(0.25),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// 0-based element access.
    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }
}

pub(crate) fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(*hermitian_eigenvalues(m)?.last().expect("non-empty"))
}

pub fn make_initial_state(params: InitialStateParams) -> Result<DensityMatrix> {
    params.validate()?;
    let InitialStateParams { r, alpha } = params;
    let mixed = (1.0 - r) / 4.0;
    let a2 = alpha * alpha;
    let coherence = r * alpha * (1.0 - a2).sqrt();
    let mut m = ComplexMatrix::diag_real(&[mixed, mixed + r * (1.0 - a2), mixed + r * a2, mixed]);
    m[(1, 2)] = C64::new(coherence, 0.0);
    m[(2, 1)] = C64::new(coherence, 0.0);
    DensityMatrix::new(m)
}

/// tr(ρ²).
pub fn purity(rho: &DensityMatrix) -> f64 {
    trace_product(&rho.matrix, &rho.matrix)
        .expect("square")
        .re
}
