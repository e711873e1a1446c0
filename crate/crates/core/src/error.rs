use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty signal")]
    EmptySignal,

    #[error("empty sequence")]
    EmptySequence,

    #[error("matrix not square")]
    NotSquare,

    #[error("invalid filterbank geometry: J={octaves}, Q={per_octave}")]
    InvalidGeometry { octaves: usize, per_octave: usize },

    #[error("filter length must be at least 2, got {0}")]
    FilterTooShort(usize),

    #[error("invalid mother wavelet: center={center}, bandwidth={bandwidth}")]
    InvalidMotherWavelet { center: f64, bandwidth: f64 },

    #[error("signal/bank length mismatch: signal has {signal} samples, bank expects {bank}")]
    LengthMismatch { signal: usize, bank: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(f64),

    #[error("covariance undefined for fewer than 2 samples")]
    CovarianceUndefined,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("signal shorter than window: {n} < {window_len}")]
    SignalShorterThanWindow { n: usize, window_len: usize },

    #[error("invalid window plan: window_len={window_len}, hop={hop}")]
    InvalidWindowPlan { window_len: usize, hop: usize },

    #[error("frame index {index} out of range (n = {n})")]
    FrameOutOfRange { index: usize, n: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("input error in {path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Pipeline(String),
}

impl Error {
    /// Errors caused by the user's input files or configuration, as opposed
    /// to failures inside the pipeline itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Input { .. } | Error::Config(_) | Error::EmptySignal | Error::SignalShorterThanWindow { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
