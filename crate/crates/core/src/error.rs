use thiserror::Error;

#[derive(Debug, Error)]
pub enum EdapError {
    #[error("point {point:?} lies outside the domain")]
    Domain { point: Vec<f64> },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("sampling is not defined on L2-tagged functions")]
    IllDefinedSampling,
    #[error("covering violated: partition denominator vanishes near {point:?}")]
    CoveringViolation { point: Vec<f64> },
    #[error("unsupported dimension {0} (only 1-D domains are supported here)")]
    UnsupportedDimension(usize),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("ill-conditioned system: {0}")]
    Conditioning(String),
    #[error("diagnostic failed: {0}")]
    DiagnosticFailure(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, EdapError>;
