use alloc::string::String;

/// Errors raised by the core pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed Y4M header: {0}")]
    MalformedHeader(String),
    #[error("truncated frame {frame}: expected {expected} bytes, found {found}")]
    TruncatedFrame {
        frame: usize,
        expected: usize,
        found: usize,
    },
    #[error("unsupported pixel format `{0}`")]
    UnsupportedPixelFormat(String),
    #[error("malformed RIFF/WAVE container: {0}")]
    MalformedRiff(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("WAV file has no sample data")]
    EmptyData,
    #[error("invalid media: {0}")]
    InvalidMedia(String),

    #[error("frame {width}x{height} is smaller than the 32x32 minimum")]
    FrameTooSmall { width: usize, height: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("signal of {len} samples is shorter than one {window}-sample window")]
    SignalTooShort { len: usize, window: usize },

    #[error("column count mismatch: {left} vs {right}")]
    ColumnCountMismatch { left: usize, right: usize },
    #[error("opinion score {0} outside [1, 5]")]
    MosOutOfRange(f64),
    #[error("clip `{id}`: feature matrix has {features} columns, target has {targets}")]
    PerClipMismatch {
        id: String,
        features: usize,
        targets: usize,
    },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected {expected} input rows, got {found}")]
    RowCountMismatch { expected: usize, found: usize },
    #[error("non-finite loss in {stage} at epoch {epoch}")]
    NonFiniteLoss { stage: &'static str, epoch: usize },

    #[error("column {column} is not a probability vector (sum {sum})")]
    NotAProbabilityColumn { column: usize, sum: f64 },
    #[error("degenerate variance: {0}")]
    DegenerateVariance(&'static str),
    #[error("{entries} entries cannot be split into {k} folds")]
    TooFewEntries { entries: usize, k: usize },
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },

    #[error("unknown distortion kind `{0}`")]
    UnknownKind(String),
    #[error("severity {0} is outside [0, 1]")]
    SeverityOutOfRange(f64),
}

impl Error {
    /// Name of the pipeline stage that raised the error, for diagnostics.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            MalformedHeader(_) | TruncatedFrame { .. } | UnsupportedPixelFormat(_) | MalformedRiff(_)
            | UnsupportedEncoding(_) | EmptyData | InvalidMedia(_) => "media-io",
            FrameTooSmall { .. } | DegenerateInput(_) => "visual-features",
            SignalTooShort { .. } => "audio-features",
            ColumnCountMismatch { .. } | MosOutOfRange(_) | PerClipMismatch { .. } | EmptyInput(_) => {
                "fusion"
            }
            DimensionMismatch(_) | RowCountMismatch { .. } | NonFiniteLoss { .. } => "neural",
            NotAProbabilityColumn { .. } | DegenerateVariance(_) => "scoring",
            TooFewEntries { .. } | Fold { .. } => "cv-harness",
            UnknownKind(_) | SeverityOutOfRange(_) => "distortion-lab",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
