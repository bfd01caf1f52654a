use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical method failed to reach its tolerance.
    #[error("evaluation failed: {0}")]
    Evaluation(String),

    /// Gram-Schmidt met an edge (nearly) in the span of the previous ones.
    #[error("degenerate flat: pivot norm {pivot:e} below tolerance {tol:e}")]
    DegenerateFlat { pivot: f64, tol: f64 },

    /// Two results or inputs disagree on shape or configuration.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Not enough data for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An exact rational computation overflowed.
    #[error("exact arithmetic overflow in {0}")]
    Overflow(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn eval(msg: impl Into<String>) -> Self {
        Error::Evaluation(msg.into())
    }
}
