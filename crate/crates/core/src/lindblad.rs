//! Markovian open-system models and their vectorized generators.
//!
//! A [`LindbladModel`] is a Hermitian Hamiltonian `H` plus a set of jump
//! channels `L_k`; its density matrix evolves as
//!
//! ```text
//! dρ/dt = ℒρ = −i[H, ρ] + Σ_k ( L_k ρ L_k† − ½{L_k†L_k, ρ} )
//! ```
//!
//! Column-stacking `ρ` turns the generator into a `d²×d²` matrix
//!
//! ```text
//! L = −i(1⊗H − Hᵀ⊗1) + Σ_k [ L_k*⊗L_k − ½ 1⊗L_k†L_k − ½ (L_k†L_k)ᵀ⊗1 ]
//! ```
//!
//! on which everything else in this crate is built: the trace functional
//! becomes a constant left null vector (trace preservation), the steady
//! state is the right null vector, and the group (Drazin) pseudo-inverse —
//! the inverse restricted to the decaying subspace — is the workhorse
//! behind zero-frequency noise, quantum-Fisher-information rates, and
//! counting-statistics cumulants.

use std::sync::OnceLock;

use ndarray_linalg::{Eigh as _, OperationNorm as _, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    dagger, eig, kron, solve_linear, stack_columns, unstack_columns, CMatrix, CVector,
    SpectralDecomposition,
};

/// Relative threshold deciding which Liouvillian eigenvalues count as zero
/// when testing for a unique steady state.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;

/// One dissipative channel of a Lindblad model.
///
/// `weight` and `phase` describe how a detector watching this channel
/// contributes to the default output current: each detected jump adds
/// `weight` in the counting (jump) unravelling, while in the diffusive
/// unravelling `phase` selects the measured quadrature.  `efficiency` is the
/// fraction of this channel's events the detector actually sees.
#[derive(Debug, Clone)]
pub struct JumpChannel {
    pub label: String,
    pub operator: CMatrix,
    pub weight: f64,
    pub phase: f64,
    pub monitored: bool,
    pub efficiency: f64,
}

impl JumpChannel {
    /// A monitored, unit-weight, unit-efficiency channel.
    pub fn new(label: impl Into<String>, operator: CMatrix) -> Self {
        Self {
            label: label.into(),
            operator,
            weight: 1.0,
            phase: 0.0,
            monitored: true,
            efficiency: 1.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_monitored(mut self, monitored: bool) -> Self {
        self.monitored = monitored;
        self
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Self {
        self.efficiency = efficiency;
        self
    }
}

/// A Hamiltonian plus jump channels on a fixed finite Hilbert space.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: CMatrix,
    channels: Vec<JumpChannel>,
}

impl LindbladModel {
    /// Validates Hermiticity of `H` and dimensional consistency of all
    /// channels.
    pub fn new(hamiltonian: CMatrix, channels: Vec<JumpChannel>) -> Result<Self> {
        let (rows, cols) = hamiltonian.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let scale = hamiltonian
            .iter()
            .map(|z| z.norm())
            .fold(1.0f64, f64::max);
        let deviation = crate::linalg::max_abs(&(&hamiltonian - &dagger(&hamiltonian)));
        if deviation > 1e-12 * scale {
            return Err(Error::NonHermitian { deviation });
        }
        for ch in &channels {
            if ch.operator.dim() != (rows, cols) {
                return Err(Error::DimensionMismatch(format!(
                    "channel `{}` is {:?}, expected ({rows}, {cols})",
                    ch.label,
                    ch.operator.dim()
                )));
            }
            if !(0.0..=1.0).contains(&ch.efficiency) {
                return Err(Error::InvalidModel(format!(
                    "channel `{}` has efficiency {} outside [0, 1]",
                    ch.label, ch.efficiency
                )));
            }
        }
        Ok(Self {
            hamiltonian,
            channels,
        })
    }

    pub fn dimension(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[JumpChannel] {
        &self.channels
    }

    /// Rewrite every partially detected channel (`efficiency < 1`) as a
    /// detected `√η L` piece plus an undetected `√(1−η) L` piece.
    ///
    /// The generator is unchanged by this split; only the bookkeeping of
    /// which events reach the detector differs.  Original channel indices
    /// are preserved (the detected pieces come first, in order), so current
    /// weights indexed against the original model remain valid.
    pub fn split_inefficient_channels(&self) -> LindbladModel {
        let mut detected = Vec::with_capacity(self.channels.len());
        let mut undetected = Vec::new();
        for ch in &self.channels {
            if ch.efficiency >= 1.0 {
                detected.push(ch.clone());
            } else {
                let eta = ch.efficiency;
                detected.push(JumpChannel {
                    operator: ch.operator.mapv(|z| z * eta.sqrt()),
                    efficiency: 1.0,
                    ..ch.clone()
                });
                undetected.push(JumpChannel {
                    label: format!("{}/undetected", ch.label),
                    operator: ch.operator.mapv(|z| z * (1.0 - eta).sqrt()),
                    weight: ch.weight,
                    phase: ch.phase,
                    monitored: false,
                    efficiency: 1.0,
                });
            }
        }
        detected.extend(undetected);
        LindbladModel {
            hamiltonian: self.hamiltonian.clone(),
            channels: detected,
        }
    }

    /// The non-Hermitian generator `H − (i/2) Σ_k L_k† L_k` driving the
    /// deterministic part of pure-state trajectories.
    pub fn effective_hamiltonian(&self) -> CMatrix {
        let mut heff = self.hamiltonian.clone();
        for ch in &self.channels {
            let ldl = dagger(&ch.operator).dot(&ch.operator);
            heff = heff + ldl.mapv(|z| z * Complex64::new(0.0, -0.5));
        }
        heff
    }

    /// Shorthand for [`vectorize`].
    pub fn liouvillian(&self) -> VectorizedLiouvillian {
        vectorize(self)
    }
}

/// The trace functional as a stacked row vector: `⟨1|·stack_columns(ρ) = tr ρ`.
pub fn trace_row(dim: usize) -> CVector {
    let mut v = CVector::zeros(dim * dim);
    for c in 0..dim {
        v[c * dim + c] = Complex64::new(1.0, 0.0);
    }
    v
}

/// Trace of a column-stacked square matrix.
pub fn stacked_trace(v: &CVector, dim: usize) -> Complex64 {
    (0..dim).map(|c| v[c * dim + c]).sum()
}

/// Superoperator for left multiplication: `stack(A·ρ) = (1⊗A)·stack(ρ)`.
pub fn left_multiplication(op: &CMatrix) -> CMatrix {
    kron(&CMatrix::eye(op.nrows()), op)
}

/// Superoperator for right multiplication: `stack(ρ·A) = (Aᵀ⊗1)·stack(ρ)`.
pub fn right_multiplication(op: &CMatrix) -> CMatrix {
    kron(&op.t().to_owned(), &CMatrix::eye(op.nrows()))
}

/// Superoperator of the two-sided jump map `ρ ↦ L ρ L†`, i.e. `L*⊗L`.
pub fn jump_superoperator(op: &CMatrix) -> CMatrix {
    kron(&op.mapv(|z| z.conj()), op)
}

/// `(m + m†)/2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &dagger(m)).mapv(|z| z * 0.5)
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (to 1e−12), unit trace (to 1e−10), and
    /// positivity (eigenvalues ≥ −1e−10).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        let herm_dev = crate::linalg::max_abs(&(&matrix - &dagger(&matrix)));
        if herm_dev > 1e-12 * scale {
            return Err(Error::InvalidModel(format!(
                "density matrix is not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let trace: Complex64 = matrix.diag().sum();
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidModel(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        let spectrum = hermitize(&matrix).eigh(UPLO::Lower)?;
        if let Some(&min) = spectrum
            .0
            .iter()
            .min_by(|a, b| a.total_cmp(b))
        {
            if min < -1e-10 {
                return Err(Error::InvalidModel(format!(
                    "density matrix has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Hermitize and trace-normalize, then validate.  This is the entry
    /// point for numerically computed states whose defects are rounding
    /// noise rather than modelling errors.
    pub fn normalized(matrix: CMatrix) -> Result<Self> {
        let herm = hermitize(&matrix);
        let trace: Complex64 = herm.diag().sum();
        if trace.norm() < 1e-300 {
            return Err(Error::InvalidModel(
                "cannot normalize a traceless matrix into a state".into(),
            ));
        }
        Self::new(herm.mapv(|z| z / trace))
    }

    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidModel("zero state vector".into()));
        }
        let d = psi.len();
        let m = CMatrix::from_shape_fn((d, d), |(r, c)| {
            psi[r] * psi[c].conj() / (norm * norm)
        });
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::eye(dim).mapv(|z| z / dim as f64),
        }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `tr(op·ρ)`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        op.dot(&self.matrix).diag().sum()
    }

    /// Column-stacked form `|ρ⟩`.
    pub fn stacked(&self) -> CVector {
        stack_columns(&self.matrix)
    }
}

/// The vectorized generator with lazily computed spectral data.
///
/// Holds the efficiency-split model it was built from, so downstream
/// consumers (currents, counting statistics, trajectories) can look up jump
/// operators and detection flags consistently.
#[derive(Debug)]
pub struct VectorizedLiouvillian {
    model: LindbladModel,
    matrix: CMatrix,
    spectrum: OnceLock<Result<SpectralDecomposition>>,
    steady: OnceLock<Result<CVector>>,
    drazin: OnceLock<Result<CMatrix>>,
}

/// Build the `d²×d²` generator matrix of a model.
///
/// Channels with `efficiency < 1` are first split into detected and
/// undetected pieces (see
/// [`LindbladModel::split_inefficient_channels`]); the resulting matrix is
/// identical, but the stored model reflects what a detector can see.
pub fn vectorize(model: &LindbladModel) -> VectorizedLiouvillian {
    let model = model.split_inefficient_channels();
    let d = model.dimension();
    let id = CMatrix::eye(d);
    let h = &model.hamiltonian;

    let commutator = kron(&id, h) - kron(&h.t().to_owned(), &id);
    let mut matrix = commutator.mapv(|z| z * Complex64::new(0.0, -1.0));
    for ch in &model.channels {
        let ldl = dagger(&ch.operator).dot(&ch.operator);
        matrix = matrix + jump_superoperator(&ch.operator)
            - kron(&id, &ldl).mapv(|z| z * 0.5)
            - kron(&ldl.t().to_owned(), &id).mapv(|z| z * 0.5);
    }

    VectorizedLiouvillian {
        model,
        matrix,
        spectrum: OnceLock::new(),
        steady: OnceLock::new(),
        drazin: OnceLock::new(),
    }
}

impl VectorizedLiouvillian {
    /// Wrap an explicit superoperator matrix (used for adjoints and tilted
    /// generators).  The associated model is kept for channel lookups.
    pub fn from_matrix(matrix: CMatrix, model: LindbladModel) -> Result<Self> {
        let d = model.dimension();
        if matrix.dim() != (d * d, d * d) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator is {:?}, expected ({n}, {n}) for Hilbert dimension {d}",
                matrix.dim(),
                n = d * d
            )));
        }
        Ok(Self {
            model,
            matrix,
            spectrum: OnceLock::new(),
            steady: OnceLock::new(),
            drazin: OnceLock::new(),
        })
    }

    pub fn hilbert_dim(&self) -> usize {
        self.model.dimension()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// The efficiency-split model this generator was built from.
    pub fn model(&self) -> &LindbladModel {
        &self.model
    }

    /// Spectral decomposition, computed once and cached.
    pub fn spectrum(&self) -> Result<&SpectralDecomposition> {
        self.spectrum
            .get_or_init(|| eig(&self.matrix))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Index of the (unique) eigenvalue closest to zero, with a uniqueness
    /// check: exactly one eigenvalue may lie within
    /// `ZERO_EIGENVALUE_TOL · max|λ|` of zero.
    pub fn stationary_index(&self) -> Result<usize> {
        let sd = self.spectrum()?;
        let max_mag = sd
            .eigenvalues
            .iter()
            .map(|l| l.norm())
            .fold(0.0f64, f64::max);
        let near_zero = sd
            .eigenvalues
            .iter()
            .filter(|l| l.norm() <= ZERO_EIGENVALUE_TOL * max_mag)
            .count();
        if near_zero != 1 {
            return Err(Error::MultipleSteadyStates { count: near_zero });
        }
        Ok(sd
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.norm().total_cmp(&b.norm()))
            .expect("nonempty spectrum")
            .0)
    }

    /// Column-stacked steady state `|ρss⟩`, normalized to unit trace.
    ///
    /// Solved as the consistent overdetermined system `[L; ⟨1|]·x = [0; 1]`,
    /// which avoids a full eigendecomposition; a rank deficiency of that
    /// system signals a degenerate stationary subspace.
    pub fn steady_vector(&self) -> Result<&CVector> {
        self.steady
            .get_or_init(|| self.compute_steady())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn compute_steady(&self) -> Result<CVector> {
        let d = self.model.dimension();
        let n = d * d;
        let mut augmented = CMatrix::zeros((n + 1, n));
        augmented.slice_mut(ndarray::s![..n, ..]).assign(&self.matrix);
        augmented.row_mut(n).assign(&trace_row(d));
        let mut rhs = CVector::zeros(n + 1);
        rhs[n] = Complex64::new(1.0, 0.0);

        let x = match solve_linear(&augmented, &rhs) {
            Ok(x) => x,
            Err(Error::RankDeficient { rank, cols }) => {
                return Err(Error::MultipleSteadyStates {
                    count: cols - rank + 1,
                })
            }
            Err(e) => return Err(e),
        };

        // Hermitize + renormalize, then confirm this really is a null vector.
        let state = DensityMatrix::normalized(unstack_columns(&x, d))?;
        let stacked = state.stacked();
        let residual = self
            .matrix
            .dot(&stacked)
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        let scale = self.matrix.opnorm_one()?.max(1.0);
        if residual > 1e-8 * scale {
            return Err(Error::Lapack(format!(
                "steady-state residual {residual:.3e} too large for matrix scale {scale:.3e}"
            )));
        }
        Ok(stacked)
    }

    /// Steady state as a density matrix.
    pub fn steady_state(&self) -> Result<DensityMatrix> {
        let d = self.model.dimension();
        DensityMatrix::new(unstack_columns(self.steady_vector()?, d))
    }

    /// Heisenberg-picture generator: the conjugate transpose of the matrix.
    /// Observables evolve as `stack(A(t)) = e^{L†t}·stack(A)`.
    pub fn adjoint(&self) -> VectorizedLiouvillian {
        VectorizedLiouvillian {
            model: self.model.clone(),
            matrix: dagger(&self.matrix),
            spectrum: OnceLock::new(),
            steady: OnceLock::new(),
            drazin: OnceLock::new(),
        }
    }

    /// The group (Drazin) pseudo-inverse `Σ_{j≠0} λ_j⁻¹ |x_j⟩⟨y_j|`: zero on
    /// the stationary mode, the ordinary inverse on the decaying subspace.
    pub fn drazin(&self) -> Result<&CMatrix> {
        self.drazin
            .get_or_init(|| self.compute_drazin())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn compute_drazin(&self) -> Result<CMatrix> {
        let stationary = self.stationary_index()?;
        let sd = self.spectrum()?;
        let weights: CVector = sd
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, l)| {
                if j == stationary {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0) / l
                }
            })
            .collect();
        Ok(sd.weighted_reconstruction(&weights))
    }

    /// Apply the Drazin pseudo-inverse to one vector without forming the
    /// full inverse, through the augmented least-squares system
    /// `[L; ⟨1|]·z = [v − |ρss⟩⟨1|v⟩; 0]`.
    pub fn drazin_apply(&self, v: &CVector) -> Result<CVector> {
        let d = self.model.dimension();
        let n = d * d;
        if v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs Liouville dimension {n}",
                v.len()
            )));
        }
        let steady = self.steady_vector()?;
        let overlap = stacked_trace(v, d);

        let mut augmented = CMatrix::zeros((n + 1, n));
        augmented.slice_mut(ndarray::s![..n, ..]).assign(&self.matrix);
        augmented.row_mut(n).assign(&trace_row(d));
        let mut rhs = CVector::zeros(n + 1);
        rhs.slice_mut(ndarray::s![..n])
            .assign(&(v - &steady.mapv(|z| z * overlap)));

        solve_linear(&augmented, &rhs)
    }

    /// Evolve a state for time `t`.
    ///
    /// Uses the cached spectral decomposition when one has already been
    /// computed, otherwise a direct scaling-and-squaring exponential.
    pub fn propagate(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        let evolved = self.propagate_stacked(&rho0.stacked(), t)?;
        let d = self.model.dimension();
        let trace = stacked_trace(&evolved, d);
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
            return Err(Error::NonFinite("trace lost during propagation"));
        }
        DensityMatrix::normalized(unstack_columns(&evolved, d))
    }

    /// Evolve an arbitrary stacked operator for time `t`.
    pub fn propagate_stacked(&self, v: &CVector, t: f64) -> Result<CVector> {
        match self.spectrum.get() {
            Some(Ok(sd)) => Ok(sd.propagate(v, t)),
            _ => crate::linalg::expm_action(&self.matrix, v, t),
        }
    }
}
