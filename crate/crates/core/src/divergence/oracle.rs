//! Brute-force evaluations of `(1/(α−1)) log ∫ p^α q^{1−α}` that never touch
//! the closed forms: adaptive quadrature in one dimension, Monte Carlo in any.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Gaussian1, GaussianN};
use crate::linalg;
use crate::quadrature::integrate_adaptive;
use crate::{Error, RenyiOrder, Result};

/// Half-width of the integration window in pooled standard deviations.
pub const WINDOW_STDS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Adaptive Gauss–Kronrod; one-dimensional inputs only. The budget is
    /// the maximum number of subintervals.
    Quadrature,
    /// Importance sampling from the first argument; the budget is the
    /// number of draws.
    MonteCarlo { seed: u64 },
}

/// Oracle value and its error estimate (a standard error for Monte Carlo,
/// the Kronrod error bound propagated through the log for quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub error: f64,
}

/// Numerical Rényi divergence between two Gaussians.
pub fn oracle_renyi_divergence(
    gi: &GaussianN,
    gj: &GaussianN,
    order: RenyiOrder,
    mode: OracleMode,
    budget: usize,
) -> Result<OracleEstimate> {
    if gi.dim() != gj.dim() {
        return Err(Error::DimensionMismatch {
            expected: gi.dim(),
            found: gj.dim(),
        });
    }
    if budget == 0 {
        return Err(Error::InvalidParameter(
            "oracle budget must be positive".into(),
        ));
    }
    check_integrable(gi, gj, order)?;
    match mode {
        OracleMode::Quadrature => {
            if gi.dim() != 1 {
                return Err(Error::InvalidParameter(
                    "quadrature oracle is one-dimensional".into(),
                ));
            }
            let p = Gaussian1::new(gi.mean()[0], gi.covariance()[(0, 0)])?;
            let q = Gaussian1::new(gj.mean()[0], gj.covariance()[(0, 0)])?;
            quadrature(&p, &q, order, budget)
        }
        OracleMode::MonteCarlo { seed } => monte_carlo(gi, gj, order, budget, seed),
    }
}

/// Scalar convenience wrapper over the quadrature oracle.
pub fn oracle_renyi_divergence1(
    p: &Gaussian1,
    q: &Gaussian1,
    order: RenyiOrder,
    budget: usize,
) -> Result<OracleEstimate> {
    oracle_renyi_divergence(
        &p.to_multivariate(),
        &q.to_multivariate(),
        order,
        OracleMode::Quadrature,
        budget,
    )
}

/// The integrand's exponent is the quadratic `−½ xᵀ(αΣ_i⁻¹ + (1−α)Σ_j⁻¹)x + …`;
/// the integral converges iff that precision is positive definite.
fn check_integrable(gi: &GaussianN, gj: &GaussianN, order: RenyiOrder) -> Result<()> {
    let a = order.value();
    if a < 1.0 {
        return Ok(());
    }
    let precision = linalg::spd_inverse(gi.covariance())? * a
        + linalg::spd_inverse(gj.covariance())? * (1.0 - a);
    if linalg::is_positive_definite(&linalg::symmetrize(&precision)) {
        Ok(())
    } else {
        Err(Error::Diverged(format!(
            "∫ p^α q^(1−α) does not converge for α = {a}"
        )))
    }
}

fn quadrature(
    p: &Gaussian1,
    q: &Gaussian1,
    order: RenyiOrder,
    budget: usize,
) -> Result<OracleEstimate> {
    let a = order.value();
    let log_integrand = |x: f64| a * p.log_pdf(x) + (1.0 - a) * q.log_pdf(x);

    // Peak of the integrand's exponent, used to centre the window and to
    // shift the exponent so that exp() stays in range.
    let prec = a / p.variance() + (1.0 - a) / q.variance();
    let centre = (a * p.mean() / p.variance() + (1.0 - a) * q.mean() / q.variance()) / prec;
    let pooled = p.std_dev().max(q.std_dev()).max(prec.sqrt().recip());
    let lo = p.mean().min(q.mean()).min(centre) - WINDOW_STDS * pooled;
    let hi = p.mean().max(q.mean()).max(centre) + WINDOW_STDS * pooled;
    let shift = log_integrand(centre);

    let est = integrate_adaptive(
        |x| (log_integrand(x) - shift).exp(),
        lo,
        hi,
        0.0,
        1e-14,
        budget,
    );
    if !(est.value.is_finite() && est.value > 0.0) {
        return Err(Error::Diverged(
            "quadrature produced a non-positive integral".into(),
        ));
    }
    let log_integral = shift + est.value.ln();
    Ok(OracleEstimate {
        value: log_integral / (a - 1.0),
        error: est.error / (est.value * (a - 1.0).abs()),
    })
}

fn monte_carlo(
    gi: &GaussianN,
    gj: &GaussianN,
    order: RenyiOrder,
    draws: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    let a = order.value();
    let n = gi.dim();
    let chol_i = linalg::cholesky(gi.covariance())?;
    let chol_j = linalg::cholesky(gj.covariance())?;
    let l = chol_i.l();
    // log q(x) − log p(x) without the shared 2π terms.
    let half_log_det =
        0.5 * (linalg::log_det_cholesky(&chol_i) - linalg::log_det_cholesky(&chol_j));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // E_p[(q/p)^{1−α}] = ∫ p^α q^{1−α}; Welford accumulation of the weights.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut z = DVector::zeros(n);
    for k in 0..draws {
        z.iter_mut()
            .for_each(|v| *v = StandardNormal.sample(&mut rng));
        let x = gi.mean() + &l * &z;
        let dj = &x - gj.mean();
        let log_ratio =
            half_log_det - 0.5 * linalg::inv_quad_form(&chol_j, &dj) + 0.5 * z.norm_squared();
        let w = ((1.0 - a) * log_ratio).exp();
        let delta = w - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (w - mean);
    }
    let var = if draws > 1 {
        m2 / (draws - 1) as f64
    } else {
        0.0
    };
    let se_mean = (var / draws as f64).sqrt();
    Ok(OracleEstimate {
        value: mean.ln() / (a - 1.0),
        error: se_mean / (mean * (a - 1.0).abs()),
    })
}
