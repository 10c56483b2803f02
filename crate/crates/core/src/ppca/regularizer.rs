//! The Rényi regularizer `D_{1−α}[q(y) ‖ W(y|x)]` for `q = N(0, I)` and the
//! P-PCA posterior `W`, evaluated from the spectrum of `Λ` alone.
//!
//! With `Σ_q = I` and `Σ_W = V diag(1/(1+λ²)) Vᵀ` sharing the eigenbasis `V`,
//! both summands of the Gaussian closed form diagonalise. The scalar summand
//! is `x̄ᵀ U diag(H) Uᵀ x̄` and the log-determinant summand is
//! `Σ_l [log(1 + (1−α)λ²) − (1−α) log(1+λ²)]`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{LatentSpectrum, PpcaModel};
use crate::divergence::renyi_divergence_gaussian;
use crate::{linalg, Error, GaussianN, RenyiOrder, Result};

/// Largest `N_x` for which [`dense_oracle_regularizer`] builds `N_x × N_x`
/// matrices.
pub const DENSE_GUARD: usize = 512;

/// The pieces of one regularizer evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizerBreakdown {
    /// Bare quadratic form `x̄ᵀ U diag(H) Uᵀ x̄` at the mapped order.
    pub scalar_term: f64,
    /// Exact log-determinant ratio at the mapped order.
    pub logdet_term_corrected: f64,
    /// The printed product-of-determinants expression at the mapped order.
    pub logdet_term_paper: f64,
    /// `D_{1−α}[q ‖ W]`.
    pub total_corrected: f64,
    /// `log(δ Π(1+λ²) + 1)`, the printed closed form, log-det piece only.
    pub total_paper: f64,
    /// The mapped order `1 − α` at which the divergence is evaluated.
    pub order_used: RenyiOrder,
}

/// `λ²(1+λ²)/(1 + λ² − αλ²)`.
pub fn g_alpha_diag(spec: &LatentSpectrum, order: RenyiOrder) -> Result<DVector<f64>> {
    let a = order.require_unit_interval()?.value();
    Ok(spec
        .singular_values()
        .map(|l| l * l * (1.0 + l * l) / (1.0 + (1.0 - a) * l * l)))
}

/// `(I − G⁻) G^α (I − G⁻)`, elementwise `λ² / ((1+λ²)(1 + λ² − αλ²))`.
pub fn h_alpha_diag(spec: &LatentSpectrum, order: RenyiOrder) -> Result<DVector<f64>> {
    let g = g_alpha_diag(spec, order)?;
    Ok(DVector::from_fn(g.len(), |l, _| {
        let s = spec.singular_values()[l];
        g[l] / (1.0 + s * s).powi(2)
    }))
}

/// `x̄ᵀ U diag(H) Uᵀ x̄` with `x̄ = x/σ`; no prefactor applied.
pub fn scalar_term(
    spec: &LatentSpectrum,
    order: RenyiOrder,
    x: &DVector<f64>,
    noise_std: f64,
) -> Result<f64> {
    let u = spec.left_vectors();
    if x.len() != u.nrows() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            found: x.len(),
        });
    }
    let h = h_alpha_diag(spec, order)?;
    let proj = u.transpose() * (x / noise_std);
    Ok(h.iter().zip(proj.iter()).map(|(h, p)| h * p * p).sum())
}

/// `log(|Σ*| / (|Σ_q|^{1−α} |Σ_W|^α))`, evaluated per eigenvalue as
/// `log(1 + (1−α)λ²) − (1−α) log(1+λ²)`; each summand is non-negative by
/// concavity of the logarithm.
pub fn logdet_term_corrected(spec: &LatentSpectrum, order: RenyiOrder) -> Result<f64> {
    let a = order.require_unit_interval()?.value();
    Ok(spec
        .singular_values()
        .iter()
        .map(|l| ((1.0 - a) * l * l).ln_1p() - (1.0 - a) * (l * l).ln_1p())
        .sum())
}

/// The printed log-det chain, which replaces the determinant of a
/// combination by the combination of determinants:
/// `log[((1−α) + α P⁻¹) / (α P⁻¹)]` with `P = Π(1+λ²)`.
///
/// Kept only so the discrepancy against [`logdet_term_corrected`] can be
/// reported.
pub fn logdet_term_paper(spec: &LatentSpectrum, order: RenyiOrder) -> Result<f64> {
    let a = order.require_unit_interval()?.value();
    let log_p = spec.log_det_inflation();
    // log((1−α) + α e^{−log P}) − log α + log P, without forming P.
    Ok(((1.0 - a) + a * (-log_p).exp()).ln() - a.ln() + log_p)
}

/// The printed skew-mapped closed form `log[(α/(1−α)) Π(1+λ²) + 1]`.
/// Equals [`logdet_term_paper`] at `1 − α`.
pub fn printed_regularizer(spec: &LatentSpectrum, order: RenyiOrder) -> Result<f64> {
    let a = order.require_unit_interval()?;
    let log_term = a.delta().ln() + spec.log_det_inflation();
    // log(1 + e^t) evaluated without overflow.
    Ok(log_term.max(0.0) + (-log_term.abs()).exp().ln_1p())
}

/// `log|(1−α)I + αΣ_W| − log((1−α) + α|Σ_W|)`: the error of treating the
/// determinant of a convex combination as the combination of determinants.
/// Zero for one latent dimension, and for several only when at most one
/// `λ` is non-zero.
pub fn determinant_step_residual(spec: &LatentSpectrum, order: RenyiOrder) -> Result<f64> {
    let a = order.require_unit_interval()?.value();
    let exact: f64 = spec
        .singular_values()
        .iter()
        .map(|l| ((1.0 - a) + a / (1.0 + l * l)).ln())
        .sum();
    let printed = ((1.0 - a) + a * (-spec.log_det_inflation()).exp()).ln();
    Ok(exact - printed)
}

/// `D_{1−α}[N(0, I) ‖ W(y|x)]` from the spectrum, with the printed variant
/// alongside.
pub fn renyi_regularizer(
    model: &PpcaModel,
    x: &DVector<f64>,
    order: RenyiOrder,
) -> Result<RegularizerBreakdown> {
    model.check_x(x)?;
    let mapped = order.complement()?;
    let a = mapped.value();
    let spec = model.spectrum();
    let scalar = scalar_term(spec, mapped, x, model.noise_std())?;
    let logdet = logdet_term_corrected(spec, mapped)?;
    Ok(RegularizerBreakdown {
        scalar_term: scalar,
        logdet_term_corrected: logdet,
        logdet_term_paper: logdet_term_paper(spec, mapped)?,
        total_corrected: 0.5 * a * scalar - logdet / (2.0 * (a - 1.0)),
        total_paper: printed_regularizer(spec, order)?,
        order_used: mapped,
    })
}

/// The same divergence computed from explicitly built matrices: `β` from
/// the `N_x × N_x` inverse of `CCᵀ + σ²I`, `W = N(βx, I − βC)`, then the
/// dense Gaussian closed form.
pub fn dense_oracle_regularizer(
    model: &PpcaModel,
    x: &DVector<f64>,
    order: RenyiOrder,
) -> Result<f64> {
    model.check_x(x)?;
    if model.n_x() > DENSE_GUARD {
        return Err(Error::DenseGuardExceeded {
            n_x: model.n_x(),
            limit: DENSE_GUARD,
        });
    }
    let mapped = order.complement()?;
    let w = dense_posterior(model, x)?;
    renyi_divergence_gaussian(&GaussianN::standard(model.n_y()), &w, mapped)
}

/// `W(y|x)` via the observed-space inverse the spectral path avoids.
pub fn dense_posterior(model: &PpcaModel, x: &DVector<f64>) -> Result<GaussianN> {
    let c = model.loading();
    let n_x = model.n_x();
    let marginal = c * c.transpose() + DMatrix::identity(n_x, n_x) * model.noise_std().powi(2);
    let beta = c.transpose() * linalg::spd_inverse(&marginal)?;
    let cov = DMatrix::identity(model.n_y(), model.n_y()) - &beta * c;
    GaussianN::new(&beta * x, linalg::symmetrize(&cov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::renyi_divergence_gaussian;
    use crate::ppca::fixtures::random_model;
    use nalgebra::{dmatrix, dvector};

    fn order(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    fn toy() -> PpcaModel {
        PpcaModel::new(dmatrix![3.0; 4.0], 5.0).unwrap()
    }

    fn single(l: f64) -> LatentSpectrum {
        LatentSpectrum::from_singular_values(&[l]).unwrap()
    }

    #[test]
    fn h_alpha_values() {
        assert_eq!(h_alpha_diag(&single(0.0), order(0.5)).unwrap()[0], 0.0);
        assert!((h_alpha_diag(&single(1.0), order(0.5)).unwrap()[0] - 1.0 / 3.0).abs() < 1e-15);
        let l: f64 = 1.7;
        let small = h_alpha_diag(&single(l), order(1e-12)).unwrap()[0];
        assert!((small - l * l / (1.0 + l * l).powi(2)).abs() < 1e-11);
        assert!(h_alpha_diag(&single(1.0), order(1.5)).is_err());
    }

    #[test]
    fn scalar_term_values() {
        let m = toy();
        let s = m.spectrum();
        assert_eq!(
            scalar_term(s, order(0.5), &dvector![0.0, 0.0], 5.0).unwrap(),
            0.0
        );
        let v = scalar_term(s, order(0.5), &dvector![3.0, 4.0], 5.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert!(scalar_term(s, order(0.5), &dvector![1.0], 5.0).is_err());
    }

    #[test]
    fn scalar_term_matches_dense_quadratic_form() {
        for seed in 0..5 {
            let (m, x) = random_model(10, 3, seed);
            let w = dense_posterior(&m, &x).unwrap();
            for a in [0.2, 0.6, 0.9] {
                let sigma_star = DMatrix::identity(3, 3) * (1.0 - a) + w.covariance() * a;
                let chol = linalg::cholesky(&sigma_star).unwrap();
                let dense = linalg::inv_quad_form(&chol, w.mean());
                let fast = scalar_term(m.spectrum(), order(a), &x, m.noise_std()).unwrap();
                assert!((fast - dense).abs() <= 1e-10 * dense.max(1.0));
            }
        }
    }

    #[test]
    fn logdet_values() {
        assert_eq!(
            logdet_term_corrected(&single(0.0), order(0.5)).unwrap(),
            0.0
        );
        let v = logdet_term_corrected(&single(1.0), order(0.5)).unwrap();
        assert!((v - (0.75f64.ln() + 0.5 * 2f64.ln())).abs() < 1e-15);
        assert!((v - 0.058_891).abs() < 1e-6);
    }

    #[test]
    fn logdet_matches_dense_determinants() {
        for seed in 0..5 {
            let (m, x) = random_model(10, 4, seed);
            let w = dense_posterior(&m, &x).unwrap();
            for a in [0.1, 0.5, 0.8] {
                let sigma_star = DMatrix::identity(4, 4) * (1.0 - a) + w.covariance() * a;
                let dense = linalg::log_det_spd(&sigma_star).unwrap()
                    - a * linalg::log_det_spd(w.covariance()).unwrap();
                let fast = logdet_term_corrected(m.spectrum(), order(a)).unwrap();
                assert!((fast - dense).abs() < 1e-10, "{fast} vs {dense}");
            }
        }
    }

    #[test]
    fn printed_forms() {
        let zero = single(0.0);
        assert!((printed_regularizer(&zero, order(0.5)).unwrap() - 2f64.ln()).abs() < 1e-15);
        for a in [0.2, 0.5, 0.7] {
            let s = LatentSpectrum::from_singular_values(&[2.0, 0.3]).unwrap();
            let printed = logdet_term_paper(&s, order(1.0 - a)).unwrap();
            assert!((printed - printed_regularizer(&s, order(a)).unwrap()).abs() < 1e-13);
        }
        // A single eigenvalue of 1 already separates the two readings.
        let one = single(1.0);
        let printed = logdet_term_paper(&one, order(0.5)).unwrap();
        let corrected = logdet_term_corrected(&one, order(0.5)).unwrap();
        assert!((printed - corrected).abs() > 0.1);
        // Huge spectra stay finite.
        assert!(printed_regularizer(&single(1e200), order(0.5))
            .unwrap()
            .is_finite());
    }

    #[test]
    fn decoupled_regularizer_vanishes() {
        let m = PpcaModel::decoupled(3, 2, 1.3).unwrap();
        for a in [0.1, 0.5, 0.9] {
            let r = renyi_regularizer(&m, &dvector![1.0, -2.0, 0.4], order(a)).unwrap();
            assert_eq!(r.total_corrected, 0.0);
            assert!((r.total_paper - (1.0 / (1.0 - a)).ln()).abs() < 1e-14);
            assert_eq!(
                dense_oracle_regularizer(&m, &dvector![1.0, -2.0, 0.4], order(a)).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn regularizer_agrees_with_closed_form_and_skew_partner() {
        for seed in 0..10 {
            let (m, x) = random_model(12, 3, 100 + seed);
            let w = m.posterior(&x).unwrap();
            let q = GaussianN::standard(3);
            for a in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let r = renyi_regularizer(&m, &x, order(a)).unwrap();
                let direct = renyi_divergence_gaussian(&q, &w, order(1.0 - a)).unwrap();
                assert!((r.total_corrected - direct).abs() <= 1e-10 * direct.abs().max(1.0));
                let skew = (1.0 - a) / a * renyi_divergence_gaussian(&w, &q, order(a)).unwrap();
                assert!((r.total_corrected - skew).abs() <= 1e-10 * skew.abs().max(1.0));
                assert!(r.total_corrected >= 0.0 && r.scalar_term >= 0.0);
                assert_eq!(r.order_used, order(1.0 - a));
            }
        }
    }

    #[test]
    fn fast_path_matches_dense_oracle() {
        let m = toy();
        let x = dvector![3.0, 4.0];
        let fast = renyi_regularizer(&m, &x, order(0.5))
            .unwrap()
            .total_corrected;
        assert!((fast - dense_oracle_regularizer(&m, &x, order(0.5)).unwrap()).abs() < 1e-12);
        let (m, x) = random_model(64, 8, 17);
        for a in [0.1, 0.5, 0.9] {
            let fast = renyi_regularizer(&m, &x, order(a)).unwrap().total_corrected;
            let dense = dense_oracle_regularizer(&m, &x, order(a)).unwrap();
            assert!((fast - dense).abs() <= 1e-10 * dense.abs().max(1.0));
        }
    }

    #[test]
    fn dense_guard() {
        let m = PpcaModel::decoupled(DENSE_GUARD + 1, 1, 1.0).unwrap();
        let x = DVector::zeros(DENSE_GUARD + 1);
        assert!(matches!(
            dense_oracle_regularizer(&m, &x, order(0.5)),
            Err(Error::DenseGuardExceeded { .. })
        ));
        assert!(renyi_regularizer(&m, &x, order(0.5)).is_ok());
    }

    #[test]
    fn orders_outside_unit_interval_rejected() {
        let m = toy();
        assert!(renyi_regularizer(&m, &dvector![1.0, 1.0], order(1.5)).is_err());
    }

    #[test]
    fn determinant_step_holds_only_for_one_active_direction() {
        assert!(
            determinant_step_residual(&single(2.0), order(0.3))
                .unwrap()
                .abs()
                < 1e-15
        );
        let one_active = LatentSpectrum::from_singular_values(&[1.5, 0.0]).unwrap();
        assert!(
            determinant_step_residual(&one_active, order(0.3))
                .unwrap()
                .abs()
                < 1e-15
        );
        let two = LatentSpectrum::from_singular_values(&[1.0, 1.0]).unwrap();
        // log(0.85²) − log(0.7 + 0.3/4)
        let want = 2.0 * 0.85f64.ln() - 0.775f64.ln();
        assert!((determinant_step_residual(&two, order(0.3)).unwrap() - want).abs() < 1e-15);
    }
}
