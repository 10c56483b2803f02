//! Shared fixtures for the benchmarks.

use nalgebra::DVector;
use relbo_core::gm::{lin_space, log_space, GmGrid};
use relbo_core::ppca::fixtures::random_model;
use relbo_core::PpcaModel;

/// Observed dimensions benchmarked against a fixed latent dimension.
pub const OBSERVED_DIMS: [usize; 4] = [16, 64, 256, 512];
pub const LATENT_DIM: usize = 8;

/// A seeded model and one observation from it.
pub fn model(n_x: usize) -> (PpcaModel, DVector<f64>) {
    random_model(n_x, LATENT_DIM, n_x as u64)
}

/// A reduced landscape grid: every default order and correlation, with
/// coarser prior axes.
pub fn coarse_grid() -> GmGrid {
    GmGrid {
        var_ratios: log_space(0.25, 4.0, 4),
        mean_gaps: lin_space(0.0, 3.0, 4),
        ..GmGrid::default()
    }
}
