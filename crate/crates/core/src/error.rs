use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no box values given")]
    EmptyInput,

    /// `index` is zero-based in the caller's original ordering.
    #[error("value at index {index} is invalid: {value} (values must be finite and non-negative)")]
    InvalidValue { index: usize, value: String },

    #[error("invalid thresholds: need 0 <= t < n and 1 <= l < n, got n={n}, t={t}, l={ell}")]
    InvalidThresholds { n: usize, t: usize, ell: usize },

    #[error("values are not sorted in non-increasing order at index {index}")]
    Unsorted { index: usize },

    #[error("prefix length {i} outside the admissible range {lo}..={hi}")]
    InvalidPrefix { i: usize, lo: usize, hi: usize },

    #[error("the single-box solver requires l = 1, got l = {ell}")]
    UnsupportedEll { ell: usize },

    #[error("water level {level} outside [0, {max}]")]
    LevelOutOfRange { level: String, max: String },

    #[error("marginals have length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("marginal at index {index} is {value}, outside [0, 1]")]
    MarginalOutOfRange { index: usize, value: String },

    #[error("marginals sum to {sum}, exceeding l = {ell}")]
    MarginalsExceedBudget { sum: String, ell: usize },

    #[error("marginals sum to {sum}, expected exactly l = {ell}")]
    UnnormalizedMarginals { sum: String, ell: usize },

    #[error("instance too large for exhaustive enumeration: {what}")]
    OracleTooLarge { what: String },

    #[error("subset decomposition did not terminate within {rounds} rounds")]
    DecompositionDiverged { rounds: usize },
}
