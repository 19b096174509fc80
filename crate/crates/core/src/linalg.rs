//! Small dense helpers shared by the simulator and the analysis code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Largest entry of |U†U - I|.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let d = u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols());
    max_abs(&d)
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Operator 2-norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Lift a k-qubit operator acting on `targets` (in that order) to the full
/// `n`-qubit register. Qubit 0 is the most significant bit of the index.
pub fn embed(op: &CMatrix, targets: &[usize], n: usize) -> CMatrix {
    let dim = 1usize << n;
    let k = targets.len();
    debug_assert_eq!(op.nrows(), 1 << k);
    let mut mask = 0usize;
    for &t in targets {
        mask |= 1 << (n - 1 - t);
    }
    let sub = |idx: usize| -> usize {
        targets
            .iter()
            .fold(0usize, |acc, &t| (acc << 1) | ((idx >> (n - 1 - t)) & 1))
    };
    let mut out = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        let rs = sub(r);
        for col in 0..dim {
            if (r & !mask) != (col & !mask) {
                continue;
            }
            out[(r, col)] = op[(rs, sub(col))];
        }
    }
    out
}

/// Component of `v` relative to a reference phase: rescales so the first
/// entry with magnitude above `tol` is real and positive.
pub fn fix_phase(v: &mut CVector, tol: f64) {
    if let Some(z) = v.iter().find(|z| z.norm() > tol).copied() {
        let phase = z / z.norm();
        *v /= phase;
    }
}
