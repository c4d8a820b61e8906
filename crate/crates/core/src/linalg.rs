//! Dense complex linear-algebra kernel shared by every other module.
//!
//! The conventions fixed here propagate through the whole crate:
//!
//! * Vectorization stacks **columns**: entry `(r, c)` of a `d×d` matrix lands
//!   at position `c·d + r` of the stacked vector, so that
//!   `stack_columns(A·B·C) = kron(C.t(), A) · stack_columns(B)`.
//! * [`eig`] returns *biorthonormal* left and right eigenvectors: the left
//!   vectors are the rows of the inverse of the right-eigenvector matrix, so
//!   `⟨yⱼ|xₖ⟩ = δⱼₖ` and `Σⱼ |xⱼ⟩⟨yⱼ| = 1` hold by construction.
//! * Eigenvalues are sorted by descending real part (ties: descending
//!   imaginary part), which places the stationary eigenvalue of a generator
//!   first.

use ndarray::Array2;
use ndarray_linalg::{Eig as _, Inverse as _, LeastSquaresSvd as _, OperationNorm as _, Solve as _};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMatrix = Array2<Complex64>;
/// Dense complex vector.
pub type CVector = ndarray::Array1<Complex64>;

/// Eigenvector-matrix condition numbers above this flag the input as
/// defective (not diagonalizable to working precision).
pub const DEFECTIVE_CONDITION_LIMIT: f64 = 1e8;

/// Relative spectral-gap threshold below which a Sylvester equation is
/// treated as singular.
const SYLVESTER_GAP_TOL: f64 = 1e-12;

fn ensure_square(m: &CMatrix) -> Result<usize> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(rows)
}

/// Kronecker product `a ⊗ b` with block structure `a[i,j] · b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    ndarray::linalg::kron(a, b)
}

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

/// Largest entrywise magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Stack the columns of `m` into a single vector: entry `(r, c)` lands at
/// position `c·rows + r`.
pub fn stack_columns(m: &CMatrix) -> CVector {
    m.t().iter().copied().collect()
}

/// Inverse of [`stack_columns`] for a square matrix of side `dim`.
pub fn unstack_columns(v: &CVector, dim: usize) -> CMatrix {
    assert_eq!(v.len(), dim * dim, "stacked vector has wrong length");
    let row_major = CMatrix::from_shape_vec((dim, dim), v.to_vec()).expect("length checked");
    row_major.t().to_owned()
}

/// Eigendecomposition with biorthonormal left and right eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues, sorted by descending real part, ties broken by
    /// descending imaginary part.
    pub eigenvalues: CVector,
    /// Right eigenvectors as the columns of this matrix, in eigenvalue order.
    pub right: CMatrix,
    /// Left eigenvectors as the rows of this matrix (the inverse of
    /// `right`), in eigenvalue order.
    pub left: CMatrix,
    /// 1-norm condition number of the right-eigenvector matrix.
    pub condition: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Reconstruct `Σⱼ wⱼ |xⱼ⟩⟨yⱼ|` for arbitrary per-mode weights.
    pub fn weighted_reconstruction(&self, weights: &CVector) -> CMatrix {
        assert_eq!(weights.len(), self.dim(), "one weight per mode");
        let mut scaled = self.right.clone();
        for (j, &w) in weights.iter().enumerate() {
            scaled.column_mut(j).mapv_inplace(|z| z * w);
        }
        scaled.dot(&self.left)
    }

    /// The propagator `e^{mt}` reconstructed through the spectrum.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.weighted_reconstruction(&self.eigenvalues.mapv(|l| (l * t).exp()))
    }

    /// Apply `e^{mt}` to a vector without forming the full propagator.
    pub fn propagate(&self, v: &CVector, t: f64) -> CVector {
        let mut amplitudes = self.left.dot(v);
        for (a, &l) in amplitudes.iter_mut().zip(self.eigenvalues.iter()) {
            *a *= (l * t).exp();
        }
        self.right.dot(&amplitudes)
    }
}

/// Eigendecomposition of a general (non-Hermitian) complex square matrix.
///
/// Fails with [`Error::Defective`] when the right-eigenvector matrix is too
/// ill-conditioned to invert reliably, i.e. when the input is not
/// diagonalizable to working precision.
pub fn eig(m: &CMatrix) -> Result<SpectralDecomposition> {
    ensure_square(m)?;
    let (raw_values, raw_vectors) = m.eig()?;

    let mut order: Vec<usize> = (0..raw_values.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (raw_values[i], raw_values[j]);
        b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
    });

    let eigenvalues: CVector = order.iter().map(|&i| raw_values[i]).collect();
    let mut right = CMatrix::zeros(m.raw_dim());
    for (dst, &src) in order.iter().enumerate() {
        right.column_mut(dst).assign(&raw_vectors.column(src));
    }

    let left = right.inv().map_err(|_| Error::Defective {
        cond: f64::INFINITY,
        limit: DEFECTIVE_CONDITION_LIMIT,
    })?;
    let condition = right.opnorm_one()? * left.opnorm_one()?;
    if condition > DEFECTIVE_CONDITION_LIMIT {
        return Err(Error::Defective {
            cond: condition,
            limit: DEFECTIVE_CONDITION_LIMIT,
        });
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        right,
        left,
        condition,
    })
}

/// Solve `a·x = b`.
///
/// Square systems go through an LU factorization.  Overdetermined systems
/// are solved in the least-squares sense but must still have full column
/// rank — every rectangular system in this crate is consistent by
/// construction, so a rank deficiency is a genuine error, not a request for
/// a minimum-norm solution.
pub fn solve_linear(a: &CMatrix, b: &CVector) -> Result<CVector> {
    let (rows, cols) = a.dim();
    if b.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {rows} rows but right-hand side has {} entries",
            b.len()
        )));
    }
    if rows == cols {
        match a.solve(b) {
            Ok(x) => Ok(x),
            // LU only detects exact singularity; report the actual rank
            // from the SVD route for a useful message.
            Err(_) => {
                let ls = a.least_squares(b)?;
                Err(Error::RankDeficient {
                    rank: ls.rank as usize,
                    cols,
                })
            }
        }
    } else if rows > cols {
        let ls = a.least_squares(b)?;
        if (ls.rank as usize) < cols {
            return Err(Error::RankDeficient {
                rank: ls.rank as usize,
                cols,
            });
        }
        Ok(ls.solution)
    } else {
        Err(Error::DimensionMismatch(format!(
            "underdetermined system ({rows} equations, {cols} unknowns)"
        )))
    }
}

/// Solve the Sylvester equation `a·X + X·b = c` by diagonalizing both
/// coefficient matrices; the Lyapunov equation is the special case `b = a†`.
///
/// With `a = Xₐ Λₐ Xₐ⁻¹` and `b = X_b Λ_b X_b⁻¹` the transformed unknown
/// `Y = Xₐ⁻¹ X X_b` satisfies `Yᵢⱼ (λₐᵢ + λ_bⱼ) = (Xₐ⁻¹ c X_b)ᵢⱼ`, which is
/// solvable iff the spectra of `a` and `-b` are disjoint.
pub fn solve_sylvester(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(a)?;
    let m = ensure_square(b)?;
    if c.dim() != (n, m) {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side is {:?}, expected ({n}, {m})",
            c.dim()
        )));
    }

    let sa = eig(a)?;
    let sb = eig(b)?;

    let scale = sa
        .eigenvalues
        .iter()
        .chain(sb.eigenvalues.iter())
        .map(|l| l.norm())
        .fold(0.0, f64::max);
    let mut gap = f64::INFINITY;
    for la in sa.eigenvalues.iter() {
        for lb in sb.eigenvalues.iter() {
            gap = gap.min((la + lb).norm());
        }
    }
    if gap <= SYLVESTER_GAP_TOL * scale {
        return Err(Error::SylvesterSingular { gap });
    }

    let mut y = sa.left.dot(c).dot(&sb.right);
    for (i, la) in sa.eigenvalues.iter().enumerate() {
        for (j, lb) in sb.eigenvalues.iter().enumerate() {
            y[(i, j)] /= la + lb;
        }
    }
    Ok(sa.right.dot(&y).dot(&sb.left))
}

/// 13th-order Padé threshold for scaling-and-squaring.
const PADE13_THETA: f64 = 5.371_920_351_148_152;

const PADE13_COEFFS: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Matrix exponential `e^m` by scaling-and-squaring with a degree-13 Padé
/// approximant.  Works on defective matrices too, unlike the spectral route.
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    let d = ensure_square(m)?;
    let norm = m.opnorm_one()?;
    if !norm.is_finite() {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as i32
    } else {
        0
    };

    let scaled = m.mapv(|z| z / 2f64.powi(squarings));
    let identity = CMatrix::eye(d);
    let p2 = scaled.dot(&scaled);
    let p4 = p2.dot(&p2);
    let p6 = p2.dot(&p4);

    let b = &PADE13_COEFFS;
    let odd_inner = p6.mapv(|z| z * b[13]) + &p4.mapv(|z| z * b[11]) + &p2.mapv(|z| z * b[9]);
    let odd = scaled.dot(
        &(p6.dot(&odd_inner)
            + &p6.mapv(|z| z * b[7])
            + &p4.mapv(|z| z * b[5])
            + &p2.mapv(|z| z * b[3])
            + &identity.mapv(|z| z * b[1])),
    );
    let even_inner = p6.mapv(|z| z * b[12]) + &p4.mapv(|z| z * b[10]) + &p2.mapv(|z| z * b[8]);
    let even = p6.dot(&even_inner)
        + &p6.mapv(|z| z * b[6])
        + &p4.mapv(|z| z * b[4])
        + &p2.mapv(|z| z * b[2])
        + &identity.mapv(|z| z * b[0]);

    let denominator = &even - &odd;
    let mut result = denominator.inv()?.dot(&(&even + &odd));
    for _ in 0..squarings {
        result = result.dot(&result);
    }

    if result.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential result"));
    }
    Ok(result)
}

/// Apply `e^{mt}` to a vector.
pub fn expm_action(m: &CMatrix, v: &CVector, t: f64) -> Result<CVector> {
    if !t.is_finite() {
        return Err(Error::NonFinite("propagation time"));
    }
    let d = ensure_square(m)?;
    if v.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "matrix side {d} vs vector length {}",
            v.len()
        )));
    }
    Ok(expm(&m.mapv(|z| z * t))?.dot(v))
}
