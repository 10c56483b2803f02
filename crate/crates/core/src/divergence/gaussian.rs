use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, SYMMETRY_TOLERANCE};
use crate::{Error, RenyiOrder, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Scalar Gaussian `N(mean, variance)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian1 {
    mean: f64,
    variance: f64,
}

impl Gaussian1 {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::NonFinite("Gaussian mean"));
        }
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "variance must be positive, got {variance}"
            )));
        }
        Ok(Self { mean, variance })
    }

    pub fn standard() -> Self {
        Self {
            mean: 0.0,
            variance: 1.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (LN_2PI + self.variance.ln() + d * d / self.variance)
    }

    pub fn to_multivariate(&self) -> GaussianN {
        GaussianN {
            mean: DVector::from_element(1, self.mean),
            covariance: DMatrix::from_element(1, 1, self.variance),
        }
    }
}

/// Multivariate Gaussian with a symmetric positive definite covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianN {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianN {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        linalg::check_square(&covariance)?;
        if covariance.nrows() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                found: covariance.nrows(),
            });
        }
        if !mean.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("Gaussian mean"));
        }
        linalg::check_finite(&covariance, "Gaussian covariance")?;
        if !linalg::is_symmetric(&covariance, SYMMETRY_TOLERANCE) {
            return Err(Error::NotPositiveDefinite(
                "covariance is not symmetric".into(),
            ));
        }
        let covariance = linalg::symmetrize(&covariance);
        if !linalg::is_positive_definite(&covariance) {
            return Err(Error::NotPositiveDefinite(
                "covariance eigenvalues fall below the relative floor".into(),
            ));
        }
        Ok(Self { mean, covariance })
    }

    /// `N(0, I_n)`.
    pub fn standard(n: usize) -> Self {
        Self {
            mean: DVector::zeros(n),
            covariance: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn log_pdf(&self, x: &DVector<f64>) -> Result<f64> {
        check_dims(self.dim(), x.len())?;
        let chol = linalg::cholesky(&self.covariance)?;
        let d = x - &self.mean;
        Ok(-0.5
            * (self.dim() as f64 * LN_2PI
                + linalg::log_det_cholesky(&chol)
                + linalg::inv_quad_form(&chol, &d)))
    }
}

impl From<Gaussian1> for GaussianN {
    fn from(g: Gaussian1) -> Self {
        g.to_multivariate()
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Closed-form Rényi divergence between Gaussians:
///
/// `D_α = (α/2) Δᵀ Σ*⁻¹ Δ − (1/(2(α−1))) log(|Σ*| / (|Σ_i|^{1−α} |Σ_j|^α))`
/// with `Σ* = (1−α)Σ_i + αΣ_j`. For `α > 1` the combination may fail to be
/// positive definite, in which case the integral diverges and
/// [`Error::InfeasibleOrder`] is returned.
pub fn renyi_divergence_gaussian(gi: &GaussianN, gj: &GaussianN, order: RenyiOrder) -> Result<f64> {
    check_dims(gi.dim(), gj.dim())?;
    let a = order.value();
    let combined = &gi.covariance * (1.0 - a) + &gj.covariance * a;
    if !linalg::is_positive_definite(&combined) {
        return Err(Error::InfeasibleOrder { alpha: a });
    }
    let chol = linalg::cholesky(&combined)?;
    let diff = &gi.mean - &gj.mean;
    let quad = linalg::inv_quad_form(&chol, &diff);
    let log_ratio = linalg::log_det_cholesky(&chol)
        - (1.0 - a) * linalg::log_det_spd(&gi.covariance)?
        - a * linalg::log_det_spd(&gj.covariance)?;
    Ok(0.5 * a * quad - log_ratio / (2.0 * (a - 1.0)))
}

/// Scalar form of [`renyi_divergence_gaussian`].
pub fn renyi_divergence_gaussian1(
    g0: &Gaussian1,
    g1: &Gaussian1,
    order: RenyiOrder,
) -> Result<f64> {
    let a = order.value();
    let combined = (1.0 - a) * g0.variance + a * g1.variance;
    if combined <= 0.0 {
        return Err(Error::InfeasibleOrder { alpha: a });
    }
    let d = g1.mean - g0.mean;
    let log_ratio = combined.ln() - (1.0 - a) * g0.variance.ln() - a * g1.variance.ln();
    Ok(a * d * d / (2.0 * combined) + log_ratio / (2.0 * (1.0 - a)))
}

/// `KL(N_i ‖ N_j) = ½[tr(Σ_j⁻¹Σ_i) + Δᵀ Σ_j⁻¹ Δ − n + log|Σ_j| − log|Σ_i|]`.
pub fn kl_divergence_gaussian(gi: &GaussianN, gj: &GaussianN) -> Result<f64> {
    check_dims(gi.dim(), gj.dim())?;
    let chol_j = linalg::cholesky(&gj.covariance)?;
    let diff = &gj.mean - &gi.mean;
    let trace = chol_j.solve(&gi.covariance).trace();
    let quad = linalg::inv_quad_form(&chol_j, &diff);
    let log_ratio = linalg::log_det_cholesky(&chol_j) - linalg::log_det_spd(&gi.covariance)?;
    Ok(0.5 * (trace + quad - gi.dim() as f64 + log_ratio))
}
