use crate::quadrature::QuadratureError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} must be {requirement}, got {value}")]
    Domain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("singular input: {0}")]
    Singular(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("{context}: quadrature did not converge (estimate {value:e}, error {error_estimate:e})")]
    NotConverged {
        context: String,
        value: f64,
        error_estimate: f64,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::Domain {
            name,
            requirement,
            value,
        }
    }
}
