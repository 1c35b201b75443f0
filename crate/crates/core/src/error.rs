//! Error taxonomy shared across the crate.

use thiserror::Error;

/// Errors produced by estimation, simulation and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside its mathematical domain (quantile level, multiplier, coverage, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Design matrix violates a structural requirement (rank, intercept column, dimensions).
    #[error("design error: {0}")]
    Design(String),

    /// Basis matrix is singular where an inverse is required.
    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    /// Linear program is unbounded below (frontier problems with pathological designs).
    #[error("unbounded program: {0}")]
    Unbounded(String),

    /// Constraint set for the type-2 limit problem admits no starting vertex.
    #[error("infeasible constraints: {0}")]
    InfeasibleConstraints(String),

    /// Truncated point process is too short for a stable argmin.
    #[error("truncation insufficient: solution still unstable after {doublings} doublings (M = {m})")]
    TruncationInsufficient { m: usize, doublings: usize },

    /// A quantile spacing used as a denominator is zero or has the wrong sign.
    #[error("degenerate spacing: {0}")]
    SpacingDegenerate(String),

    /// The asymptotic regime visibly failed in the sample (e.g. nonpositive spacing ratio).
    #[error("regime failure: {0}")]
    RegimeFailure(String),

    /// Heterogeneity index violates the no-crossing requirement x'c > 0.
    #[error("crossing violation: {0}")]
    CrossingViolation(String),

    /// A moment matrix is not positive definite.
    #[error("moment error: {0}")]
    Moment(String),

    /// Data generator received inconsistent inputs.
    #[error("generator error: {0}")]
    Generator(String),

    /// Requested computation needs closed forms the model does not provide.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// Pivoting failed to terminate within the iteration budget.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Error from a batch operation, annotated with the offending quantile level.
    #[error("at level tau = {tau}: {source}")]
    AtLevel {
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    /// Error from a replicated simulation, annotated with the replication index.
    #[error("at replication {rep}: {source}")]
    AtReplication {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    /// Malformed or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for I/O and configuration errors (CLI exit code 2); the rest are
    /// domain or regime errors (exit code 1).
    pub fn is_io_or_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => true,
            Error::AtLevel { source, .. } | Error::AtReplication { source, .. } => {
                source.is_io_or_config()
            }
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
