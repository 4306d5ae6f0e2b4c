use thiserror::Error;

/// Errors reported by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty partial-quotient list")]
    EmptyExpansion,

    #[error("partial quotient {0} is not a positive integer")]
    BadQuotient(i128),

    #[error("value {0} lies outside the open unit interval")]
    OutOfUnitInterval(String),

    /// A finite expansion ran out of quotients before the requested step.
    #[error("expansion exhausted at step {step}: {needed} quotient(s) needed, {available} available")]
    Exhausted {
        step: usize,
        needed: usize,
        available: usize,
    },

    #[error("{value} lies on the boundary of partition cell {cell}")]
    CellEndpoint { value: String, cell: String },

    #[error("word length {len} exceeds the bound {max}")]
    LengthBound { len: String, max: u64 },

    #[error("rotation number must satisfy 0 < theta < 1/2, got {0}")]
    ThetaRange(String),

    #[error("starting point must satisfy 0 <= x < 1, got {0}")]
    StartRange(String),

    #[error("operands live in different quadratic fields (sqrt {0} vs sqrt {1})")]
    FieldMismatch(String, String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse theta spec {spec:?}: {reason}")]
    ThetaSpec { spec: String, reason: String },

    #[error("no grid point matched the target word with at most {max_errors} errors (best: {best})")]
    NoEncodingMatch { max_errors: usize, best: usize },

    #[error("branch cutoff too aggressive: row {row} retains mass {mass}")]
    CutoffTooAggressive { row: usize, mass: f64 },

    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("function evaluated below its cutoff: {x} < {cutoff}")]
    BelowCutoff { x: f64, cutoff: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("nothing to emit")]
    EmptyTable,

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
