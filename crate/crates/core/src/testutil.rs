//! Shared helpers for unit tests: deterministic pseudo-random matrices and
//! maximum-entrywise-difference assertions.

use crate::linalg::{CMatrix, CVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Deterministic complex matrix with entries uniform in `[-1,1] + i[-1,1]`.
pub(crate) fn random_cmatrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    CMatrix::from_shape_fn((rows, cols), |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Deterministic complex vector with entries uniform in `[-1,1] + i[-1,1]`.
pub(crate) fn random_cvector(len: usize, seed: u64) -> CVector {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    CVector::from_shape_fn(len, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Largest entrywise absolute difference between two matrices.
pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.dim(), b.dim(), "shape mismatch in comparison");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise absolute difference between two vectors.
pub(crate) fn max_abs_diff_vec(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch in comparison");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
