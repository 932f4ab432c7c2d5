use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible space parameters: {0}")]
    Admissibility(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("degenerate parameters a - b = {0} in the connection formula")]
    DegenerateConnection(f64),

    #[error("double series does not terminate")]
    NonTerminating,

    #[error("index out of range: {0}")]
    Index(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("constant audit failed: {0}")]
    Audit(String),

    #[error("cache file: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
