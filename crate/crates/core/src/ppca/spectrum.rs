use nalgebra::{DMatrix, DVector, SVD};

use crate::{Error, Result};

/// Thin SVD `Λ = U diag(λ) Vᵀ` with `λ` in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentSpectrum {
    left_vectors: DMatrix<f64>,
    singular_values: DVector<f64>,
    right_vectors: DMatrix<f64>,
}

impl LatentSpectrum {
    /// SVD of an `N_x × N_y` scaled loading with `N_y ≤ N_x`.
    pub fn from_scaled_loading(lambda: &DMatrix<f64>) -> Result<Self> {
        if !lambda.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("scaled loading"));
        }
        let svd = SVD::new(lambda.clone(), true, true);
        let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
            return Err(Error::InvalidParameter("SVD did not converge".into()));
        };
        Ok(Self {
            left_vectors: u,
            singular_values: svd.singular_values,
            right_vectors: v_t.transpose(),
        })
    }

    /// A spectrum with identity singular vectors (`N_x = N_y`), for
    /// quantities that depend on `λ` alone.
    pub fn from_singular_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() || !values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Error::InvalidParameter(
                "singular values must be non-empty, finite and non-negative".into(),
            ));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let n = sorted.len();
        Ok(Self {
            left_vectors: DMatrix::identity(n, n),
            singular_values: DVector::from_vec(sorted),
            right_vectors: DMatrix::identity(n, n),
        })
    }

    /// `U`, `N_x × N_y`.
    pub fn left_vectors(&self) -> &DMatrix<f64> {
        &self.left_vectors
    }

    /// `λ_1 ≥ … ≥ λ_{N_y} ≥ 0`.
    pub fn singular_values(&self) -> &DVector<f64> {
        &self.singular_values
    }

    /// `V`, `N_y × N_y`.
    pub fn right_vectors(&self) -> &DMatrix<f64> {
        &self.right_vectors
    }

    pub fn latent_dim(&self) -> usize {
        self.singular_values.len()
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values[0]
    }

    /// `U diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.left_vectors
            * DMatrix::from_diagonal(&self.singular_values)
            * self.right_vectors.transpose()
    }

    /// `log Π(1 + λ²)`.
    pub fn log_det_inflation(&self) -> f64 {
        self.singular_values.iter().map(|&l| log1p_sq(l)).sum()
    }

    /// Diagonal of `L(I + L²)⁻¹L`: `λ²/(1+λ²)`.
    pub fn g_minus(&self) -> DVector<f64> {
        self.singular_values.map(|l| l * l / (1.0 + l * l))
    }
}

/// `log(1 + λ²)` without overflow for huge `λ`.
pub(crate) fn log1p_sq(l: f64) -> f64 {
    if l > 1.0 {
        2.0 * l.ln() + (l * l).recip().ln_1p()
    } else {
        (l * l).ln_1p()
    }
}
