use thiserror::Error;

/// Everything that can go wrong inside the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant term is zero")]
    ZeroConstantTerm,
    #[error("polynomial has a repeated root")]
    RepeatedRoot,
    #[error("precision ceiling of {0} bits reached")]
    PrecisionCeiling(u32),
    #[error("degree {degree} is too small for {what}")]
    DegreeTooSmall { degree: usize, what: String },
    #[error("no qualifying pair")]
    NoQualifyingPair,
    #[error("quality undefined for height 1")]
    QualityUndefined,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("series: {0}")]
    Series(String),
    #[error("record store: {0}")]
    Store(String),
    #[error("checkpoint belongs to a different search spec")]
    CheckpointMismatch,
    #[error("record schema version {found} is not supported (expected {expected})")]
    Schema { found: u32, expected: u32 },
    #[error("table schema mismatch: {0}")]
    TableSchema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Domain errors are problems with the mathematical input rather than with
    /// the environment; the CLI maps them to exit code 1.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Store(_))
    }
}
