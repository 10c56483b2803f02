//! Rényi-entropy evidence lower bound (RELBO) machinery.
//!
//! The crate is organised bottom-up:
//!
//! * [`divergence`]: entropies, KL and Rényi divergences for discrete and
//!   Gaussian families, the geometric-mixture identity, and independent
//!   quadrature / Monte-Carlo oracles.
//! * [`ppca`]: the probabilistic-PCA model, its Gaussian posterior and the
//!   SVD spectral evaluation of the Rényi regularizer `D_{1-α}[q ‖ W]`,
//!   alongside a dense reference evaluation.
//! * [`relbo`]: SELBO, β-ELBO and RELBO assembly on the P-PCA testbed, the
//!   optimal encoder `V*` and the exact bound identity.
//! * [`gm`]: the bivariate-Gaussian landscape of the prior objective.
//! * [`dichotomic`]: the 2×2 discrete counterexample machinery.
//!
//! All natural logarithms; every value is in nats.

pub mod dichotomic;
pub mod divergence;
mod error;
pub mod gm;
pub mod linalg;
pub mod ppca;
pub mod quadrature;
pub mod relbo;

pub use divergence::{DiscreteDist, Gaussian1, GaussianN, RenyiOrder};
pub use error::{Error, Result};
pub use ppca::{LatentSpectrum, PpcaModel, RegularizerBreakdown};
pub use relbo::{BoundReport, GaussianEncoder};
