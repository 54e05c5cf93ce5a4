use thiserror::Error;

/// Errors raised by design construction and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("term references variable {index} but the design has {d} variables")]
    IndexOutOfRange { index: usize, d: usize },

    #[error("model matrix is rank deficient; dependent columns: {dependent:?}")]
    Singular { dependent: Vec<usize> },

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("requested design has {runs} runs, above the limit of {limit}")]
    TooLarge { runs: u128, limit: u128 },

    #[error("invalid generators: {0}")]
    InvalidGenerator(String),

    #[error("no construction available for order {order}; supported: {supported}")]
    ConstructionUnavailable { order: usize, supported: String },

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("operation not supported for {0} coding")]
    UnsupportedCoding(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("correlation matrix not positive definite with nugget up to {nugget:e}")]
    Conditioning { nugget: f64 },

    #[error("plan is corrupt: {0}")]
    CorruptPlan(String),

    #[error("oracle failed at run {run}: {message}")]
    Oracle { run: usize, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures of numerical routines (conditioning, LP, singular
    /// systems) as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::Infeasible
                | Error::Unbounded
                | Error::IterationLimit(_)
                | Error::Numeric(_)
                | Error::Conditioning { .. }
                | Error::ConstructionFailed(_)
        )
    }
}
