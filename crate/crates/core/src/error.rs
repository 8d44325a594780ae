use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input data outside the admissible region (exponent ordering, sign
    /// constraints, shape mismatches). The message names the violated bound.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Scalar argument outside an operation's domain, e.g. t <= 0 on a fiber.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operation only defined in the strict convexity regime gamma > 1 + alpha.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// A documented precondition fails for the given data (lambda beyond the
    /// fiber cap, mu outside the root band, zero field, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iteration exhausted its budget or produced unusable numbers.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
