use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),

    /// The smallest all-zero penalty is zero: no penalized column correlates
    /// with the residual of the unpenalized block.
    #[error("lambda_max is zero; the penalized block carries no signal")]
    DegenerateLambdaMax,

    #[error("coordinate descent did not converge after {cycles} cycles")]
    NoConvergence {
        cycles: usize,
        best_intercept: f64,
        best_coefficients: Vec<f64>,
    },
}
