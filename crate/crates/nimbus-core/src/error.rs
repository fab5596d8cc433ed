//! Error type shared by all pipeline modules.

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Coarse error class, used by callers that map errors to process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input data or a violated domain precondition.
    Data,
    /// The calibration procedure cannot produce a result.
    Calibration,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("solar: day number {0} is outside 1..=366")]
    DayNumberOutOfRange(u32),

    #[error("solar: latitude {0} is outside [-90, 90] degrees")]
    InvalidLatitude(f64),

    #[error("solar: longitude {0} is outside [-180, 180] degrees")]
    InvalidLongitude(f64),

    #[error("solar: zenith angle {0} is outside [0, 180] degrees")]
    ZenithOutOfRange(f64),

    #[error("solar: eccentricity correction {0} is outside the accepted [0.9, 1.1] band")]
    EccentricityOutOfRange(f64),

    #[error("solar: irradiance {0} W/m^2 is negative")]
    NegativeIrradiance(f64),

    #[error("luminance: crop side {side} exceeds image dimensions {width}x{height}")]
    CropTooLarge { side: u32, width: u32, height: u32 },

    #[error("luminance: crop side must be at least 1 pixel")]
    CropTooSmall,

    #[error("luminance: image has no pixels")]
    EmptyImage,

    #[error("luminance: pixel buffer holds {got} bytes, expected {expected} for {width}x{height} RGB")]
    PixelBufferMismatch {
        width: u32,
        height: u32,
        expected: usize,
        got: usize,
    },

    #[error("luminance: failed to decode image {path}: {source}")]
    ImageDecode {
        path: PathBuf,
        source: image::ImageError,
    },

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("index: clear-sky luminance {0} is at or below the night guard; sample has no defined index")]
    NightSample(f64),

    #[error("index: critical index {0} is outside (0, 1]")]
    InvalidCriticalIndex(f64),

    #[error("index: luminance values must be finite and non-negative, got l_m={l_m}, l_c={l_c}")]
    InvalidLuminancePair { l_m: f64, l_c: f64 },

    #[error("stats: empirical CDF requires at least one finite value")]
    EmptyCdf,

    #[error("ingest: {0}")]
    Ingest(String),

    #[error("ingest: {path}:{line}: {message}")]
    GaugeRow {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("synth: {0}")]
    Config(String),

    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("json: {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl Error {
    /// Class used for exit-code mapping: calibration failures are reported
    /// separately from ordinary data errors.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Calibration(_) => ErrorClass::Calibration,
            _ => ErrorClass::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
