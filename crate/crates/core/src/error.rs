use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // skeleton
    #[error("harmonization map references source joint `{0}` which is not in the sequence")]
    MissingSourceJoint(String),
    #[error("required canonical joint `{0}` has no mapping")]
    MissingRequiredTarget(String),
    #[error("`{0}` is not a canonical joint")]
    NotCanonical(String),
    #[error("canonical joint `{0}` is targeted more than once")]
    DuplicateTarget(String),
    #[error("duplicate joint name `{0}`")]
    DuplicateJoint(String),
    #[error("invalid pose sequence: {0}")]
    InvalidPose(String),
    #[error("map line {line}: {message}")]
    MapSyntax { line: usize, message: String },

    // kinematics
    #[error("marker `{0}` is not in the joint set")]
    UnknownMarker(String),
    #[error("unknown angle `{0}`")]
    UnknownAngle(String),
    #[error("unknown activity `{0}`")]
    UnknownActivity(String),
    #[error("invalid angle definition `{name}`: {message}")]
    InvalidDefinition { name: String, message: String },
    #[error("sample rate must be positive, got {0}")]
    InvalidRate(f64),

    // dsp / metrics
    #[error("signal has no usable samples")]
    EmptySignal,
    #[error("signal contains invalid samples; interpolate first")]
    NotFullyValid,
    #[error("window of {window} samples exceeds signal length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("median window must be odd, got {0}")]
    EvenWindow(usize),
    #[error("window must be at least 1 sample")]
    ZeroWindow,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("reference signal has zero range")]
    ZeroRange,
    #[error("signal has zero variance")]
    ZeroVariance,
    #[error("no records to aggregate")]
    EmptyInput,

    // align
    #[error("overlap of {0} samples is too short to align")]
    InsufficientOverlap(usize),
    #[error("sample rates differ: {0} Hz vs {1} Hz")]
    RateMismatch(f64, f64),

    // ingest
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("file contains no frames")]
    NoFrames,
    #[error("missing `endheader` line")]
    MissingEndHeader,
    #[error("column count mismatch: expected {expected}, found {found} (line {line})")]
    ColumnCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("row count mismatch: header declares {expected}, found {found}")]
    RowCountMismatch { expected: usize, found: usize },
    #[error("line {line}, column {col}: non-numeric cell `{token}`")]
    NonNumericCell {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("time column must be first and strictly increasing ({0})")]
    BadTimeColumn(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("unknown model kind `{0}`")]
    UnknownModelKind(String),
    #[error("manifest field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("cannot resolve path `{}`", .0.display())]
    UnresolvablePath(PathBuf),

    // report
    #[error("records span several activities: {0}")]
    MixedActivities(String),
    #[error("{0}")]
    Plot(String),

    #[error("{path}: {source}", path = .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
