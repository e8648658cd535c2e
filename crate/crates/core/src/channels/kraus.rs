//! Operator-sum representations and their completeness defect.

use crate::channels::{amplitude_damping, dephasing, sgad, ADParams, DephasingParams, SGADParams};
use crate::error::{QslError, Result};
use crate::linalg::{kron, pauli, ComplexMatrix};

/// A set is considered complete when its defect is at most this.
pub const KRAUS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| QslError::DimensionMismatch {
            expected: "at least one operator".into(),
            found: "empty set".into(),
        })?;
        let n = first.rows();
        for op in &operators {
            if op.rows() != n || op.cols() != n {
                return Err(QslError::DimensionMismatch {
                    expected: format!("{n}x{n}"),
                    found: format!("{}x{}", op.rows(), op.cols()),
                });
            }
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    pub fn defect(&self) -> f64 {
        kraus_defect(self)
    }

    pub fn is_valid(&self) -> bool {
        self.defect() <= KRAUS_TOL
    }

    /// ρ ↦ Σ E ρ E†.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for e in &self.operators {
            out = &out + &(&(e * rho) * &e.adjoint());
        }
        out
    }

    /// {√w_a A ⊗ √w_b B}: the tensor product of two sets.
    pub fn tensor(&self, other: &KrausSet) -> KrausSet {
        let operators = self
            .operators
            .iter()
            .flat_map(|a| other.operators.iter().map(move |b| kron(a, b)))
            .collect();
        KrausSet { operators }
    }
}

/// ‖Σ E†E − I‖_F.
pub fn kraus_defect(ks: &KrausSet) -> f64 {
    let n = ks.dim();
    let mut sum = ComplexMatrix::zeros(n, n);
    for e in &ks.operators {
        sum = &sum + &(&e.adjoint() * e);
    }
    (&sum - &ComplexMatrix::identity(n)).frobenius_norm()
}

/// {√(1−z) I, √z σ_z}.
pub fn dephasing_single(params: &DephasingParams, t: f64) -> KrausSet {
    let (_, z) = dephasing::dephasing_kernel(t, params);
    KrausSet {
        operators: vec![
            pauli::identity().scale_real((1.0 - z).sqrt()),
            pauli::sigma_z().scale_real(z.sqrt()),
        ],
    }
}

pub fn dephasing_uncorrelated(params: &DephasingParams, t: f64) -> KrausSet {
    let s = dephasing_single(params, t);
    s.tensor(&s)
}

/// {√(1−z) I⊗I, √z σ_z⊗σ_z}.
pub fn dephasing_correlated(params: &DephasingParams, t: f64) -> KrausSet {
    let (_, z) = dephasing::dephasing_kernel(t, params);
    let zz = kron(&pauli::sigma_z(), &pauli::sigma_z());
    KrausSet {
        operators: vec![ComplexMatrix::identity(4).scale_real((1.0 - z).sqrt()), zz.scale_real(z.sqrt())],
    }
}

pub fn ad_single(params: &ADParams, t: f64) -> Result<KrausSet> {
    Ok(KrausSet {
        operators: amplitude_damping::single_qubit_kraus(params, t)?.to_vec(),
    })
}

pub fn ad_uncorrelated(params: &ADParams, t: f64) -> Result<KrausSet> {
    Ok(KrausSet {
        operators: amplitude_damping::two_qubit_kraus(params, t)?.0,
    })
}

pub fn ad_correlated(params: &ADParams, t: f64) -> Result<KrausSet> {
    Ok(KrausSet {
        operators: amplitude_damping::two_qubit_kraus(params, t)?.1,
    })
}

/// Published single-qubit SGAD set; generally not complete.
pub fn sgad_single_printed(params: &SGADParams, t: f64) -> KrausSet {
    KrausSet {
        operators: sgad::printed_single_qubit_kraus(params, t),
    }
}

/// Published correlated SGAD set; generally not complete.
pub fn sgad_correlated_printed(params: &SGADParams, t: f64) -> KrausSet {
    KrausSet {
        operators: sgad::printed_correlated_kraus(params, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dephasing_sets_complete() {
        let p = DephasingParams::new(1.0).unwrap();
        for t in [0.0, 0.4, 3.0] {
            assert!(dephasing_single(&p, t).defect() < 1e-14);
            assert!(dephasing_uncorrelated(&p, t).defect() < 1e-14);
            assert!(dephasing_correlated(&p, t).defect() < 1e-14);
        }
    }

    #[test]
    fn ad_sets_complete() {
        for p in [ADParams::new(2.0, 1.0).unwrap(), ADParams::new(0.2, 1.0).unwrap()] {
            for t in [0.0, 0.4, 3.0, 8.0] {
                assert!(ad_single(&p, t).unwrap().is_valid());
                assert!(ad_uncorrelated(&p, t).unwrap().is_valid());
                assert!(ad_correlated(&p, t).unwrap().is_valid());
            }
        }
    }

    #[test]
    fn printed_sgad_defect_is_reported() {
        let p = SGADParams::new(0.0, 0.0, 1.0).unwrap();
        let d = sgad_single_printed(&p, 1.0).defect();
        assert!(d.is_finite() && d > 1e-3);
        assert!(sgad_correlated_printed(&SGADParams::new(1.0, 1.0, 1.0).unwrap(), 1.0)
            .defect()
            .is_finite());
    }

    #[test]
    fn rejects_mixed_dimensions() {
        assert!(KrausSet::new(vec![]).is_err());
        assert!(KrausSet::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(4)]).is_err());
    }
}
