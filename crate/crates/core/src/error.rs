use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Iterative numerics (series, quadrature, eigensolver) failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Two exact routes to the same quantity disagreed. Always a bug.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("no Herglotz branch of the Stieltjes cubic at z = {0}")]
    BranchSelection(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
