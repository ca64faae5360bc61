use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimensions do not match: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (||m - m^H||_F = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("qubit index {0} is out of range (expected 1, 2 or 3)")]
    BadIndex(usize),

    #[error("generator index {0} is out of range (expected 1..=6)")]
    BadGeneratorIndex(usize),

    #[error("{0:?} is not a permutation of (1, 2, 3)")]
    BadPermutation([usize; 3]),

    #[error("state vector is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid density matrix: {0}")]
    InvariantViolation(String),

    #[error("coupling constant must be positive and finite, got {0}")]
    BadCoupling(f64),

    #[error("step too large: k*dt = {k_dt} exceeds 0.1")]
    StepTooLarge { k_dt: f64 },

    #[error("invalid time arguments: t = {t}, dt = {dt}")]
    BadTime { t: f64, dt: f64 },

    #[error("columns are not orthonormal (||v^H v - I||_F = {deviation:.3e})")]
    NotIsometry { deviation: f64 },

    #[error("density matrix has rank 0")]
    Degenerate,

    #[error("invalid convex-roof search settings: {0}")]
    BadRoofSettings(String),

    #[error("bad configuration for `{field}`: {message}")]
    BadConfig {
        field: &'static str,
        message: String,
    },

    #[error("state has rank {rank}; convex-roof searches above rank 4 need --allow-rank8")]
    RankTooHigh { rank: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
