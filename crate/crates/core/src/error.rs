use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Probability mass beyond the cutoff exceeded the allowed deficit.
    #[error("cutoff too small: dim {dim} leaves truncation deficit {deficit:.3e}")]
    CutoffTooSmall { dim: usize, deficit: f64 },

    /// A beamsplitter would have coupled populated amplitudes into photon-number
    /// blocks that do not fit inside the truncated space.
    #[error("amplitude leak: weight {weight:.3e} in photon-number blocks >= {dim}")]
    AmplitudeLeak { dim: usize, weight: f64 },

    #[error("insufficient truncation headroom: unitarity defect {defect:.3e}")]
    Headroom { defect: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate normalization: norm^2 = {norm_sq:.3e}")]
    DegenerateNormalization { norm_sq: f64 },

    /// A computed probability or fidelity left [0, 1].
    #[error("{what} = {value:.6e} is outside [0, 1]")]
    OutOfRange { what: String, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by numerical preconditions (cutoffs, headroom,
    /// degenerate states) rather than bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::CutoffTooSmall { .. }
                | Error::AmplitudeLeak { .. }
                | Error::Headroom { .. }
                | Error::DegenerateNormalization { .. }
                | Error::OutOfRange { .. }
        )
    }
}
