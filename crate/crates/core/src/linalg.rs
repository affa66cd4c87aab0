//! Small dense complex linear algebra on top of `nalgebra`.
//!
//! Vectorization is column-stacking throughout: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Op4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `|i⟩⟨j|` on a `dim`-dimensional space.
pub fn ket_bra(dim: usize, i: usize, j: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

pub fn vectorize(m: &DMatrix<C64>) -> DVector<C64> {
    // nalgebra storage is already column-major
    DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &DVector<C64>, dim: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Superoperator of `X ↦ A X B`.
pub fn sandwich(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    b.transpose().kronecker(a)
}

/// Matrix exponential (Padé approximant with scaling and squaring).
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.clone().exp()
}

/// Largest `|m − m†|` entry.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a 2×2 Hermitian matrix given by its diagonal and upper
/// off-diagonal entry, ascending.
#[inline]
pub fn hermitian2_eigenvalues(a: f64, d: f64, b: C64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    [mean - r, mean + r]
}

/// Shannon entropy in bits of a probability vector; `0·log 0 = 0` and
/// negative round-off is clamped to zero.
#[inline]
pub fn shannon_bits(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 })
        .sum()
}

pub fn op4_to_dyn(m: &Op4) -> DMatrix<C64> {
    DMatrix::from_column_slice(4, 4, m.as_slice())
}

pub fn dyn_to_op4(m: &DMatrix<C64>) -> Op4 {
    Op4::from_column_slice(m.as_slice())
}
