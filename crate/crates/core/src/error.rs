use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
///
/// Divergences that are infinite are *not* errors: they are returned as
/// `f64::INFINITY` so that sweeps can record them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Rényi order {0}: must be finite, > 0 and != 1")]
    InvalidOrder(f64),

    #[error("Rényi order {0} must lie strictly inside (0, 1) here")]
    OrderOutsideUnitInterval(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("order {alpha} is infeasible: the combined covariance is not positive definite")]
    InfeasibleOrder { alpha: f64 },

    #[error("mixture normalizer is zero")]
    ZeroNormalizer,

    #[error("loading matrix is rank deficient (smallest/largest singular value = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),

    #[error("latent dimension {latent} must be in 1..{observed}")]
    InvalidLatentDim { latent: usize, observed: usize },

    #[error("dense evaluation refused: N_x = {n_x} exceeds the guard of {limit}")]
    DenseGuardExceeded { n_x: usize, limit: usize },

    #[error("s(0) = {s0} gives q(0) = {q0} > 1")]
    InadmissibleS0 { s0: f64, q0: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle integral diverged: {0}")]
    Diverged(String),

    #[error("model document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
