use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an accepted prime (need a prime 5 <= p <= 2^20)")]
    BadPrime(u64),
    #[error("mismatched moduli: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("non-invertible element")]
    NonInvertible,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("spectral gap too small: clusters {0:.3e} apart")]
    SpectralGap(f64),
    #[error("unexpected degenerate spectrum: eigenspace of dimension {0}")]
    DegenerateSpectrum(usize),
    #[error("ill-conditioned support")]
    IllConditioned,
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("corrupt dictionary file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
