//! Column-stacking superoperators: vec(ε(ρ)) = S·vec(ρ).

use crate::dual::{Dual, DualMatrix};
use crate::linalg::{hermitian_eigenvalues, kron, ComplexMatrix, C64};

/// Superoperator of a linear action on n×n matrices, built column by column
/// from the images of the matrix units |i⟩⟨j|.
pub(crate) fn from_action(n: usize, action: impl Fn(&DualMatrix) -> DualMatrix) -> DualMatrix {
    let mut s = DualMatrix::zeros(n * n);
    for j in 0..n {
        for i in 0..n {
            let image = action(&DualMatrix::constant(ComplexMatrix::unit(n, i, j)));
            let col = i + n * j;
            for b in 0..n {
                for a in 0..n {
                    s.set(a + n * b, col, image.get(a, b));
                }
            }
        }
    }
    s
}

/// A linear map on dual matrices; the derivative is carried along.
pub(crate) type Action = Box<dyn Fn(&DualMatrix) -> DualMatrix>;

/// ρ ↦ Σ_k w_k K_k ρ K_k†.
///
/// Carrying the probability weights outside the operators keeps square roots
/// of vanishing probabilities out of the derivative.
pub(crate) fn kraus_action(terms: Vec<(Dual, DualMatrix)>) -> Action {
    let terms: Vec<_> = terms.into_iter().map(|(w, k)| (w, k.adjoint(), k)).collect();
    Box::new(move |x| {
        let mut out = DualMatrix::zeros(x.dim());
        for (w, kd, k) in &terms {
            out = out.add(&k.matmul(x).matmul(kd).scale(*w));
        }
        out
    })
}

/// ε_a ⊗ ε_b on 4×4 inputs, applied one qubit at a time.
pub(crate) fn local_tensor_action(a: Action, b: Action) -> Action {
    Box::new(move |x| on_first(&on_second(x, &b), &a))
}

/// (id ⊗ ε)(x): ε acts on each 2×2 block x_ab.
fn on_second(x: &DualMatrix, f: &Action) -> DualMatrix {
    let mut y = DualMatrix::zeros(4);
    for a in 0..2 {
        for b in 0..2 {
            let mut block = DualMatrix::zeros(2);
            for k in 0..2 {
                for l in 0..2 {
                    block.set(k, l, x.get(2 * a + k, 2 * b + l));
                }
            }
            let out = f(&block);
            for k in 0..2 {
                for l in 0..2 {
                    y.set(2 * a + k, 2 * b + l, out.get(k, l));
                }
            }
        }
    }
    y
}

/// (ε ⊗ id)(x): ε acts on the first-qubit indices at fixed second-qubit ones.
fn on_first(x: &DualMatrix, f: &Action) -> DualMatrix {
    let mut y = DualMatrix::zeros(4);
    for k in 0..2 {
        for l in 0..2 {
            let mut block = DualMatrix::zeros(2);
            for a in 0..2 {
                for b in 0..2 {
                    block.set(a, b, x.get(2 * a + k, 2 * b + l));
                }
            }
            let out = f(&block);
            for a in 0..2 {
                for b in 0..2 {
                    y.set(2 * a + k, 2 * b + l, out.get(a, b));
                }
            }
        }
    }
    y
}

/// Superoperator of ε_a ⊗ ε_b given the two single-qubit superoperators.
#[cfg(test)]
pub(crate) fn tensor_maps(a: &DualMatrix, b: &DualMatrix) -> DualMatrix {
    let mut s = DualMatrix::zeros(16);
    for i1 in 0..2 {
        for j1 in 0..2 {
            let ea = column_image(a, 2, i1 + 2 * j1);
            for i2 in 0..2 {
                for j2 in 0..2 {
                    let eb = column_image(b, 2, i2 + 2 * j2);
                    let image = ea.kron(&eb);
                    let col = (2 * i1 + i2) + 4 * (2 * j1 + j2);
                    for q in 0..4 {
                        for p in 0..4 {
                            s.set(p + 4 * q, col, image.get(p, q));
                        }
                    }
                }
            }
        }
    }
    s
}

/// Image of the matrix unit with vec-index `col`, as an n×n dual matrix.
#[cfg(test)]
fn column_image(s: &DualMatrix, n: usize, col: usize) -> DualMatrix {
    let mut m = DualMatrix::zeros(n);
    for b in 0..n {
        for a in 0..n {
            m.set(a, b, s.get(a + n * b, col));
        }
    }
    m
}

pub(crate) fn apply(superop: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let n = rho.rows();
    let v = superop.apply(&rho.vectorize()).expect("superoperator matches state dimension");
    ComplexMatrix::unvectorize(&v, n)
}

/// Choi matrix Σ_ij |i⟩⟨j| ⊗ ε(|i⟩⟨j|).
pub fn choi_matrix(superop: &ComplexMatrix) -> ComplexMatrix {
    let n = (superop.rows() as f64).sqrt().round() as usize;
    let mut choi = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let image = apply(superop, &ComplexMatrix::unit(n, i, j));
            let block = kron(&ComplexMatrix::unit(n, i, j), &image);
            choi = &choi + &block;
        }
    }
    choi
}

pub fn min_choi_eigenvalue(superop: &ComplexMatrix) -> f64 {
    let choi = choi_matrix(superop).hermitian_part();
    *hermitian_eigenvalues(&choi)
        .expect("Hermitian part is Hermitian")
        .last()
        .expect("non-empty")
}

/// max over matrix units E_ij of |tr ε(E_ij) − δ_ij|.
pub fn trace_preservation_defect(superop: &ComplexMatrix) -> f64 {
    let n = (superop.rows() as f64).sqrt().round() as usize;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let tr = apply(superop, &ComplexMatrix::unit(n, i, j)).trace();
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((tr - C64::new(want, 0.0)).norm());
        }
    }
    worst
}

/// max over matrix units of |ε(E_ij)† − ε(E_ji)|.
pub fn hermiticity_preservation_defect(superop: &ComplexMatrix) -> f64 {
    let n = (superop.rows() as f64).sqrt().round() as usize;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let a = apply(superop, &ComplexMatrix::unit(n, i, j)).adjoint();
            let b = apply(superop, &ComplexMatrix::unit(n, j, i));
            worst = worst.max(a.max_abs_diff(&b));
        }
    }
    worst
}
