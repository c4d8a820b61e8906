use thiserror::Error;

/// Unified error type for the whole library.
///
/// Numerical routines distinguish *diagnosable* failures (defective matrices,
/// degenerate steady states, unstable drift matrices, …) from plain contract
/// violations (dimension mismatches, bad grids), so callers can branch on the
/// physics-level condition instead of parsing strings.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "eigenvector matrix condition number {cond:.3e} exceeds {limit:.1e}; \
         matrix is defective to working precision"
    )]
    Defective { cond: f64, limit: f64 },

    #[error("linear system is rank deficient: rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("Sylvester equation singular: spectra of `a` and `-b` overlap (min |λ_a+λ_b| = {gap:.3e})")]
    SylvesterSingular { gap: f64 },

    #[error("LAPACK failure: {0}")]
    Lapack(String),

    #[error("Hamiltonian is not Hermitian (‖H−H†‖ = {deviation:.3e} exceeds tolerance)")]
    NonHermitian { deviation: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("steady state is not unique: {count} eigenvalues inside the zero tolerance")]
    MultipleSteadyStates { count: usize },

    #[error("channel `{0}` carries no steady-state current; the requested normalization is undefined")]
    DarkChannel(String),

    #[error("times must be strictly increasing and distinct; use the two-point function's delta weight for coincident times")]
    CoincidentTimes,

    #[error("current weights are not integer multiples of a common charge quantum")]
    NonCommensurateWeights,

    #[error("eigenvalue continuation ambiguous at χ = {chi:.6}: branches collide (overlap {overlap:.3})")]
    ContinuationAmbiguity { chi: f64, overlap: f64 },

    #[error("root bracketing failed on [{lo}, {hi}]: {what}")]
    RootBracket { lo: f64, hi: f64, what: String },

    #[error("dynamics is unstable: {0}")]
    Unstable(String),

    #[error("integration step too coarse: trace drifted by {drift:.3e} in one step (limit {limit:.1e})")]
    StepSize { drift: f64, limit: f64 },

    #[error("no-jump generator is singular (dark state present): min |λ| / max |λ| = {ratio:.3e}")]
    DarkState { ratio: f64 },

    #[error("non-finite values encountered in {0}")]
    NonFinite(&'static str),

    #[error("model file: {0}")]
    ModelFile(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Lapack(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
