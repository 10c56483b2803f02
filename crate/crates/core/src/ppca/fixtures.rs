//! Seeded random models for tests, benchmarks and the verification suite.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::PpcaModel;

/// A random `n_x × n_y` model with `σ ∈ [0.3, 2)` and loading entries of
/// standard deviation `σ · s`, `s ∈ [0.2, 1.5)`, so that the spectrum of
/// `Λ` spans weak and strong coupling. Returns one observation drawn from
/// the model as well.
pub fn random_model(n_x: usize, n_y: usize, seed: u64) -> (PpcaModel, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = rng.gen_range(0.3..2.0);
    let scale = rng.gen_range(0.2..1.5) * sigma;
    let loading = DMatrix::from_fn(n_x, n_y, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        scale * z
    });
    let model = PpcaModel::new(loading, sigma).expect("random Gaussian loading has full rank");
    let x = model.sample_data(1, rng.gen()).row(0).transpose();
    (model, x)
}
