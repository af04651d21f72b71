use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coherent amplitude |{alpha}| too large for cutoff {cutoff}: retained weight {weight:.6}")]
    TruncationTooSevere { alpha: f64, cutoff: usize, weight: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state cannot be normalized (norm {0:e})")]
    Degenerate(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("moment table is missing entry ({0}, {1})")]
    MissingMoment(usize, usize),

    #[error("rejection sampling acceptance {0:e} below floor")]
    LowAcceptance(f64),

    #[error("squeezing order must be even and positive, got {0}")]
    OddOrder(usize),

    #[error("coherent-state decomposition left residual weight {0:.4}")]
    DecompositionIncomplete(f64),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
