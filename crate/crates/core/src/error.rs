use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An exponent left the representable range of `f64`.
    #[error("range error: {0}")]
    Range(String),

    #[error("matrix is not unimodular: det = {det}")]
    NotUnimodular { det: f64 },

    /// The (r, s, t) chart is undefined when the lower-right entry vanishes.
    #[error("singular chart: |g22| = {0:e} is below 1e-14")]
    SingularChart(f64),

    #[error("zero vector has no gcd")]
    ZeroVector,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("no return within horizon {0}")]
    Horizon(f64),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// Errors that the command line reports with the runtime exit code.
    pub fn is_runtime(&self) -> bool {
        matches!(
            self,
            Error::Capacity(_) | Error::Horizon(_) | Error::NonConvergence(_)
        )
    }
}
