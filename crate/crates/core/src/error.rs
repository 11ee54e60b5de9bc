use thiserror::Error;

/// Errors produced by the stereo-unsup library.
#[derive(Debug, Error)]
pub enum StereoError {
    /// File could not be read or written.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// File exists but is not a format this library decodes.
    #[error("unsupported format for {path}: {reason}")]
    UnsupportedFormat { path: String, reason: String },
    /// Image has a bit depth outside the supported 8/16-bit range.
    #[error("unsupported bit depth for {path}: {reason}")]
    UnsupportedBitDepth { path: String, reason: String },
    /// Two buffers that must share dimensions do not.
    #[error("dimension mismatch: {context} ({a_h}x{a_w} vs {b_h}x{b_w})")]
    DimensionMismatch {
        context: &'static str,
        a_h: usize,
        a_w: usize,
        b_h: usize,
        b_w: usize,
    },
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The optimizer produced a non-finite loss.
    #[error("non-finite loss at level {level}, step {step}")]
    Diverged { level: usize, step: usize },
    /// Training data contains a single class; BCE is degenerate.
    #[error("degenerate training set: {0}")]
    DegenerateLabels(String),
}

pub type Result<T> = std::result::Result<T, StereoError>;

impl StereoError {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        StereoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dims(
        context: &'static str,
        (a_h, a_w): (usize, usize),
        (b_h, b_w): (usize, usize),
    ) -> Self {
        StereoError::DimensionMismatch {
            context,
            a_h,
            a_w,
            b_h,
            b_w,
        }
    }
}
