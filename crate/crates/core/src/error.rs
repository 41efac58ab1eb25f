use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Some `α_k ≤ 0`: the spacings are not tight and no stationary law exists.
    #[error(
        "stationarity condition violated: alpha_{index} = {value} (requires α_k > 0 for all 1 ≤ k ≤ n−1)"
    )]
    ConditionViolated { index: usize, value: f64 },

    #[error("invalid beta {0}: ordered-exponential construction requires beta > 1")]
    InvalidBeta(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
