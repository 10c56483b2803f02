//! Entropies, KL and Rényi divergences, and the oracles that check them.
//!
//! Conventions: natural logarithms throughout, `0·log 0 = 0`, `0^α = 0`.
//! Divergences that are infinite come back as `f64::INFINITY`.

mod discrete;
mod gaussian;
mod oracle;
mod order;

pub use discrete::{
    identity_b1_residual, kl_divergence_discrete, mixed_discrete, renyi_divergence_discrete,
    renyi_entropy_discrete, shannon_entropy_discrete, DiscreteDist,
};
pub use gaussian::{
    kl_divergence_gaussian, renyi_divergence_gaussian, renyi_divergence_gaussian1, Gaussian1,
    GaussianN,
};
pub use oracle::{oracle_renyi_divergence, oracle_renyi_divergence1, OracleEstimate, OracleMode};
pub use order::RenyiOrder;
