use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge ({context}): best estimate {best:?}, error estimate {error:.3e}")]
    QuadratureFailure {
        context: String,
        best: Vec<C64>,
        error: f64,
    },

    #[error("evaluation at branch point x = {0}")]
    SingularPoint(C64),

    #[error("SLD defining equation violated on the support: defect {0:.3e}")]
    SldInconsistency(f64),

    #[error("singular Fisher matrix (det = {0:.3e})")]
    SingularFisher(f64),

    #[error("mode-sum integration unstable: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
