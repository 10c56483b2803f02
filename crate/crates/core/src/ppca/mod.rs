//! Probabilistic PCA and the spectral form of its Rényi regularizer.

pub mod fixtures;
mod model;
mod regularizer;
mod spectrum;

pub use model::{ModelDocument, PpcaModel, MODEL_FORMAT_VERSION, RANK_TOLERANCE};
pub use regularizer::{
    dense_oracle_regularizer, dense_posterior, determinant_step_residual, g_alpha_diag,
    h_alpha_diag, logdet_term_corrected, logdet_term_paper, printed_regularizer, renyi_regularizer,
    scalar_term, RegularizerBreakdown, DENSE_GUARD,
};
pub use spectrum::LatentSpectrum;
