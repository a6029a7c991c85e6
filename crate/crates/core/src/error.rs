use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    InvalidChannels(usize),
    #[error("data length {actual} does not match expected {expected}")]
    DataLength { expected: usize, actual: usize },
    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("stroke {stroke} point {point} at ({x}, {y}) is outside the image")]
    OutOfBounds {
        stroke: usize,
        point: usize,
        x: i64,
        y: i64,
    },
    #[error("stroke {stroke} has radius 0")]
    InvalidRadius { stroke: usize },
    #[error("expected a single-channel image")]
    NotGrayscale,
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("sigma must be positive")]
    NonPositiveSigma,
    #[error("thresholds must satisfy 0 < low < high")]
    InvalidThresholds,
    #[error("no foreground seeds")]
    NoSeeds,
    #[error("training labels must contain both foreground and background pixels")]
    InsufficientLabels,
    #[error("feature stack has {actual} planes, forest expects {expected}")]
    FeatureMismatch { expected: usize, actual: usize },
    #[error("seeds for the {0} class are missing")]
    MissingSeedClass(&'static str),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate initialization: {0}")]
    DegenerateInit(&'static str),
    #[error("ground truth has no {0} pixels")]
    DegenerateGt(&'static str),
    #[error("session record has no masks")]
    EmptyRecord,
    #[error("ground truth mask is empty")]
    EmptyGroundTruth,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
