use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("grids differ: {0}")]
    GridMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("exponent outside admissible range: {0}")]
    Inadmissible(String),
    #[error("weight overflow: {0}")]
    Overflow(String),
    #[error("wrap-around contamination {fraction:.3e} exceeds {limit:.1e}")]
    WrapAround { fraction: f64, limit: f64 },
    #[error("spectral tail mass {fraction:.3e} in top octave at iteration {iteration}")]
    SpectralTail { iteration: usize, fraction: f64 },
    #[error("unknown suite id: {0}")]
    UnknownSuite(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
