use std::path::PathBuf;

use thiserror::Error;

/// Which part of an HDR container failed to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatErrorKind {
    MalformedHeader,
    TruncatedPayload,
    Unsupported,
}

impl std::fmt::Display for FormatErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FormatErrorKind::MalformedHeader => "malformed header",
            FormatErrorKind::TruncatedPayload => "truncated payload",
            FormatErrorKind::Unsupported => "unsupported variant",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid sample {value} at pixel (x={x}, y={y}, channel={channel}): must be finite and >= 0")]
    InvalidSample {
        x: usize,
        y: usize,
        channel: usize,
        value: f64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected:?} (w, h, c), found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },

    #[error("value {value} outside quantizer range [0, {i_max}]")]
    OutOfRange { value: f64, i_max: f64 },

    #[error("quantizer disabled (bits = 0)")]
    QuantizerDisabled,

    #[error("winding number {value} exceeds the representable range ({limit})")]
    WindingOverflow { value: u64, limit: u64 },

    #[error("negative winding reached at sample {index}")]
    NegativeWinding { index: usize },

    #[error("image too small: {0}")]
    TooSmall(String),

    #[error("{path}: {kind}: {detail}")]
    Format {
        path: PathBuf,
        kind: FormatErrorKind,
        detail: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dataset synthesis produced no records ({skipped} sources skipped)")]
    EmptyDataset { skipped: usize },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(
        path: impl Into<PathBuf>,
        kind: FormatErrorKind,
        detail: impl Into<String>,
    ) -> Self {
        Error::Format {
            path: path.into(),
            kind,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
