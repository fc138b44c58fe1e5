use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input broke a documented precondition (unit norm, canonical phase, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("zero vector where a direction was required")]
    ZeroVector,

    /// The two vectors a zero-forcing step projects against are (numerically) parallel.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("beacon is parallel to the estimate it is projected against")]
    DegenerateBeacon,

    #[error("codebook size of {0} bits is outside 0..={max}", max = crate::csi::MAX_BITS)]
    BitsOutOfRange(u32),

    #[error("codebook is empty")]
    EmptyCodebook,

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),

    #[error("need at least 3 points inside the fit window, got {found}")]
    InsufficientPoints { found: usize },

    /// Config text error. `line` is 1-based; 0 when no position is known.
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
