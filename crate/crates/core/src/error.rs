use thiserror::Error;

/// Errors produced while building problems, evaluating operators or solving.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid domain, grid or parameter value.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive reference quadrature ran out of its evaluation budget.
    #[error("quadrature did not reach tolerance {tol:e} within {evaluations} evaluations (estimated error {estimate:e})")]
    QuadratureNotConverged {
        tol: f64,
        estimate: f64,
        evaluations: usize,
    },

    /// A pivot fell below the singularity threshold during factorization.
    #[error("matrix is numerically singular: pivot {pivot:e} in column {column} below threshold {threshold:e}")]
    Singular {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    /// Configuration rejected; `path` names the offending field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
