use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {actual}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("generator matrix has dependent rows (rank {rank} < {rows} rows)")]
    DependentRows { rank: usize, rows: usize },

    #[error("the dual of the full space [{n},{n}] is the zero code")]
    TrivialDual { n: usize },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("positions do not form an information set")]
    NotInformationSet,

    #[error("size guard: {what} needs {count} steps, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        count: u128,
        limit: u128,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error(
        "merge regime requires sum of initial dimensions = final dimension ({sum} != {k_final})"
    )]
    MergeDimension { sum: usize, k_final: usize },

    #[error("matrix is not a conversion matrix for this instance")]
    NotAConversion,

    #[error("input {index} is not a codeword of its code")]
    NotACodeword { index: usize },

    #[error("time budget of {seconds:.1}s exceeded")]
    TimeBudget { seconds: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
