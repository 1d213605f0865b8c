use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid video job: {0}")]
    InvalidJob(&'static str),
    #[error("invalid model spec: {0}")]
    InvalidSpec(&'static str),
    #[error("invalid hardware spec `{name}`: {reason}")]
    InvalidHardware { name: String, reason: &'static str },
    #[error("FLOP count overflowed 128 bits")]
    Overflow,
    #[error("{0} FLOP term is not an integer for this expansion factor")]
    NonIntegralFlops(&'static str),
    #[error("efficiency mu must lie in (0, 1], got {0}")]
    InvalidMu(f64),
    #[error("layer `{0}` is not a 3D convolution")]
    NotConvolution(String),
    #[error("{0} is not supported by this model")]
    Unsupported(&'static str),
    #[error("hardware `{0}` has no power figure; energy cannot be computed")]
    MissingPower(String),
    #[error("record {0} has neither latency nor GPU energy")]
    MissingLatency(String),
    #[error("invalid measurement record {record}: {reason}")]
    InvalidRecord {
        record: String,
        reason: &'static str,
    },
    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("regression is degenerate: all predicted FLOP totals are equal")]
    DegenerateFit,
    #[error("fitted efficiency {mu} lies outside (0, 1]; model and measurements disagree")]
    MuOutOfRange { mu: f64 },
    #[error("length mismatch: {predicted} predictions vs {measured} measurements")]
    LengthMismatch { predicted: usize, measured: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("measured value at index {0} is not positive")]
    NonPositiveMeasurement(usize),
    #[error("sweep values must be strictly increasing")]
    NonIncreasingSweep,
    #[error("no default settings for model `{0}`")]
    UnmatchedModel(String),
}
