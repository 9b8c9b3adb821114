use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),

    #[error("iteration range [{from}, {to}] outside recorded span [{first}, {last}]")]
    OutsideRecordedSpan {
        from: u64,
        to: u64,
        first: u64,
        last: u64,
    },

    #[error("reference table is empty")]
    EmptyTable,

    #[error("design mismatch: expected {expected} summary components, got {got}")]
    DesignMismatch { expected: usize, got: usize },

    #[error("need at least {needed} accepted rows for regression adjustment, got {got}")]
    TooFewAccepted { needed: usize, got: usize },

    #[error("no samples supplied")]
    NoSamples,

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
