use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::LatentSpectrum;
use crate::{Error, GaussianN, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Smallest admissible ratio of the extreme singular values of the loading.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Version tag written into serialized models.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Probabilistic PCA: `x = C y + v`, `y ~ N(0, I)`, `v ~ N(0, σ² I)`.
///
/// The spectrum of `Λ = C/σ` is computed once at construction; every
/// latent-space quantity is a function of it.
#[derive(Debug, Clone, PartialEq)]
pub struct PpcaModel {
    loading: DMatrix<f64>,
    noise_std: f64,
    spectrum: LatentSpectrum,
}

/// On-disk form of a model: row-major loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub version: u32,
    pub n_x: usize,
    pub n_y: usize,
    pub sigma: f64,
    pub loading: Vec<f64>,
}

impl PpcaModel {
    pub fn new(loading: DMatrix<f64>, noise_std: f64) -> Result<Self> {
        let model = Self::with_degenerate_loading(loading, noise_std)?;
        let s = model.spectrum.singular_values();
        let ratio = s[s.len() - 1] / s[0];
        if ratio.is_nan() || ratio <= RANK_TOLERANCE {
            return Err(Error::RankDeficient { ratio });
        }
        Ok(model)
    }

    /// Like [`PpcaModel::new`] without the full-rank requirement, for the
    /// `Λ → 0` limits where latent and observed spaces decouple.
    pub fn with_degenerate_loading(loading: DMatrix<f64>, noise_std: f64) -> Result<Self> {
        if !(noise_std.is_finite() && noise_std > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise_std must be positive, got {noise_std}"
            )));
        }
        let (n_x, n_y) = loading.shape();
        if n_y == 0 || n_y > n_x {
            return Err(Error::InvalidLatentDim {
                latent: n_y,
                observed: n_x,
            });
        }
        if !loading.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("loading"));
        }
        let spectrum = LatentSpectrum::from_scaled_loading(&(&loading / noise_std))?;
        Ok(Self {
            loading,
            noise_std,
            spectrum,
        })
    }

    /// The model with an all-zero loading.
    pub fn decoupled(n_x: usize, n_y: usize, noise_std: f64) -> Result<Self> {
        Self::with_degenerate_loading(DMatrix::zeros(n_x, n_y), noise_std)
    }

    pub fn n_x(&self) -> usize {
        self.loading.nrows()
    }

    pub fn n_y(&self) -> usize {
        self.loading.ncols()
    }

    pub fn loading(&self) -> &DMatrix<f64> {
        &self.loading
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// `Λ = C/σ`.
    pub fn scaled_loading(&self) -> DMatrix<f64> {
        &self.loading / self.noise_std
    }

    pub fn spectrum(&self) -> &LatentSpectrum {
        &self.spectrum
    }

    pub(crate) fn check_x(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.n_x() {
            return Err(Error::DimensionMismatch {
                expected: self.n_x(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// The latent posterior `W(y|x)`, computed without forming any
    /// `N_x × N_x` matrix: covariance `V diag(1/(1+λ²)) Vᵀ`, mean
    /// `V diag(λ/(1+λ²)) Uᵀ x/σ`.
    pub fn posterior(&self, x: &DVector<f64>) -> Result<GaussianN> {
        self.check_x(x)?;
        let s = &self.spectrum;
        let proj = s.left_vectors().transpose() * (x / self.noise_std);
        let lam = s.singular_values();
        let v = s.right_vectors();
        let mean_coef =
            DVector::from_fn(lam.len(), |l, _| lam[l] / (1.0 + lam[l] * lam[l]) * proj[l]);
        let cov_diag = lam.map(|l| 1.0 / (1.0 + l * l));
        let cov = v * DMatrix::from_diagonal(&cov_diag) * v.transpose();
        GaussianN::new(v * mean_coef, crate::linalg::symmetrize(&cov))
    }

    /// `log N(x; 0, C Cᵀ + σ² I)` via `|CCᵀ + σ²I| = σ^{2N_x} Π(1+λ²)` and
    /// `(I + ΛΛᵀ)⁻¹ = I − U diag(λ²/(1+λ²)) Uᵀ`.
    pub fn log_evidence(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_x(x)?;
        let s = &self.spectrum;
        let xb = x / self.noise_std;
        let proj = s.left_vectors().transpose() * &xb;
        let shrink: f64 = s
            .singular_values()
            .iter()
            .zip(proj.iter())
            .map(|(l, p)| l * l / (1.0 + l * l) * p * p)
            .sum();
        let log_det = 2.0 * self.n_x() as f64 * self.noise_std.ln() + s.log_det_inflation();
        Ok(-0.5 * (self.n_x() as f64 * LN_2PI + log_det + xb.norm_squared() - shrink))
    }

    /// The marginal `N(0, C Cᵀ + σ² I)` as an explicit dense Gaussian.
    pub fn marginal(&self) -> Result<GaussianN> {
        let cov = &self.loading * self.loading.transpose()
            + DMatrix::identity(self.n_x(), self.n_x()) * self.noise_std.powi(2);
        GaussianN::new(DVector::zeros(self.n_x()), crate::linalg::symmetrize(&cov))
    }

    /// `count` draws from the generative model, one per row.
    pub fn sample_data(&self, count: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n_x, n_y) = (self.n_x(), self.n_y());
        let mut data = DMatrix::zeros(count, n_x);
        let mut y = DVector::zeros(n_y);
        for r in 0..count {
            y.iter_mut()
                .for_each(|v| *v = StandardNormal.sample(&mut rng));
            let x = &self.loading * &y;
            for c in 0..n_x {
                let noise: f64 = StandardNormal.sample(&mut rng);
                data[(r, c)] = x[c] + self.noise_std * noise;
            }
        }
        data
    }

    /// Maximum-likelihood P-PCA from the sample covariance: `σ²` is the mean
    /// of the discarded eigenvalues and each loading column is an
    /// eigenvector scaled by `√max(ev − σ², 0)`.
    pub fn fit_from_data(data: &DMatrix<f64>, latent_dim: usize) -> Result<Self> {
        let (n, n_x) = data.shape();
        if latent_dim == 0 || latent_dim >= n_x {
            return Err(Error::InvalidLatentDim {
                latent: latent_dim,
                observed: n_x,
            });
        }
        if n < 2 {
            return Err(Error::DegenerateCovariance(format!("{n} samples")));
        }
        let mean = data.row_mean();
        let centred = DMatrix::from_fn(n, n_x, |r, c| data[(r, c)] - mean[c]);
        let cov = centred.transpose() * &centred / (n - 1) as f64;
        let eig = SymmetricEigen::new(crate::linalg::symmetrize(&cov));
        let mut order: Vec<usize> = (0..n_x).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let discarded = &order[latent_dim..];
        let sigma2 =
            discarded.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / discarded.len() as f64;
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::DegenerateCovariance(format!(
                "mean discarded eigenvalue {sigma2}"
            )));
        }
        let mut loading = DMatrix::zeros(n_x, latent_dim);
        for (col, &i) in order[..latent_dim].iter().enumerate() {
            let scale = (eig.eigenvalues[i] - sigma2).max(0.0).sqrt();
            loading.set_column(col, &(eig.eigenvectors.column(i) * scale));
        }
        Self::new(loading, sigma2.sqrt())
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            version: MODEL_FORMAT_VERSION,
            n_x: self.n_x(),
            n_y: self.n_y(),
            sigma: self.noise_std,
            loading: self.loading.transpose().iter().copied().collect(),
        }
    }

    /// Rebuilds a model; a zero loading is accepted as the decoupled limit.
    pub fn from_document(doc: &ModelDocument) -> Result<Self> {
        if doc.version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported version {}",
                doc.version
            )));
        }
        if doc.loading.len() != doc.n_x * doc.n_y {
            return Err(Error::Format(format!(
                "loading has {} entries, expected {}×{}",
                doc.loading.len(),
                doc.n_x,
                doc.n_y
            )));
        }
        let loading = DMatrix::from_row_slice(doc.n_x, doc.n_y, &doc.loading);
        if loading.iter().all(|v| *v == 0.0) {
            Self::with_degenerate_loading(loading, doc.sigma)
        } else {
            Self::new(loading, doc.sigma)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_document(&doc)
    }
}
