//! Shannon, β-weighted and Rényi evidence lower bounds on the P-PCA
//! testbed, where every term is a Gaussian closed form.
//!
//! With `q = N(0, I)` the true latent marginal, the optimal encoder
//! `V* ∝ q^{1−α} W^α` satisfies, for every encoder `V`,
//!
//! `log p(x) − D[V‖V*]/α = E_V log Ṽ(x|y) − D[V‖q]/α + ((1−α)/α) D_α[W‖q]`,
//!
//! so the right-hand side (the RELBO) is a lower bound that is tight at
//! `V = V*`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::divergence::kl_divergence_gaussian;
use crate::ppca::{renyi_regularizer, PpcaModel};
use crate::{linalg, Error, GaussianN, RenyiOrder, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A linear-Gaussian encoder `V(y|x) = N(A x + b, S)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianEncoder {
    mean_map: DMatrix<f64>,
    offset: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianEncoder {
    pub fn new(
        mean_map: DMatrix<f64>,
        offset: DVector<f64>,
        covariance: DMatrix<f64>,
    ) -> Result<Self> {
        let n_y = mean_map.nrows();
        if offset.len() != n_y {
            return Err(Error::DimensionMismatch {
                expected: n_y,
                found: offset.len(),
            });
        }
        // Validates symmetry and positive definiteness.
        let g = GaussianN::new(offset, covariance)?;
        Ok(Self {
            mean_map,
            offset: g.mean().clone(),
            covariance: g.covariance().clone(),
        })
    }

    /// An encoder that ignores `x`.
    pub fn constant(dist: &GaussianN, n_x: usize) -> Self {
        Self {
            mean_map: DMatrix::zeros(dist.dim(), n_x),
            offset: dist.mean().clone(),
            covariance: dist.covariance().clone(),
        }
    }

    /// The exact posterior `W(y|x)` as an encoder: `A = Σ_W Cᵀ/σ²`.
    pub fn posterior(model: &PpcaModel) -> Self {
        let cov = posterior_covariance(model);
        Self {
            mean_map: &cov * model.loading().transpose() / model.noise_std().powi(2),
            offset: DVector::zeros(model.n_y()),
            covariance: cov,
        }
    }

    /// `V*` as an encoder: covariance `((1−α)I + αΣ_W⁻¹)⁻¹` and, since
    /// `Σ_W⁻¹ μ_W = Cᵀx/σ²`, mean map `α Σ_{V*} Cᵀ/σ²`.
    pub fn optimal(model: &PpcaModel, order: RenyiOrder) -> Result<Self> {
        let a = order.require_unit_interval()?.value();
        let cov = optimal_covariance(model, a);
        Ok(Self {
            mean_map: &cov * model.loading().transpose() * (a / model.noise_std().powi(2)),
            offset: DVector::zeros(model.n_y()),
            covariance: cov,
        })
    }

    pub fn n_x(&self) -> usize {
        self.mean_map.ncols()
    }

    pub fn n_y(&self) -> usize {
        self.mean_map.nrows()
    }

    pub fn mean_map(&self) -> &DMatrix<f64> {
        &self.mean_map
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// `V(y|x)` at one observation.
    pub fn at(&self, x: &DVector<f64>) -> Result<GaussianN> {
        if x.len() != self.n_x() {
            return Err(Error::DimensionMismatch {
                expected: self.n_x(),
                found: x.len(),
            });
        }
        GaussianN::new(&self.mean_map * x + &self.offset, self.covariance.clone())
    }

    /// A random nearby encoder. Means move by `scale` standard normals;
    /// the covariance moves a fraction `min(scale, 1)` of the way towards a
    /// random positive definite matrix, so it stays positive definite.
    pub fn perturbed<R: Rng>(&self, scale: f64, rng: &mut R) -> Self {
        let (n_y, n_x) = self.mean_map.shape();
        let mut normal = || -> f64 { StandardNormal.sample(&mut *rng) };
        let mean_map = DMatrix::from_fn(n_y, n_x, |i, j| {
            self.mean_map[(i, j)] + scale * normal() / (n_x as f64).sqrt()
        });
        let offset = self.offset.map(|v| v + scale * normal());
        let z = DMatrix::from_fn(n_y, n_y, |_, _| normal());
        let target = &z * z.transpose() / n_y as f64 + DMatrix::identity(n_y, n_y) * 0.1;
        let t = scale.clamp(0.0, 1.0);
        let covariance = linalg::symmetrize(&(&self.covariance * (1.0 - t) + target * t));
        Self {
            mean_map,
            offset,
            covariance,
        }
    }
}

fn check_encoder(encoder: &GaussianEncoder, model: &PpcaModel) -> Result<()> {
    if encoder.n_y() != model.n_y() {
        return Err(Error::DimensionMismatch {
            expected: model.n_y(),
            found: encoder.n_y(),
        });
    }
    if encoder.n_x() != model.n_x() {
        return Err(Error::DimensionMismatch {
            expected: model.n_x(),
            found: encoder.n_x(),
        });
    }
    Ok(())
}

/// `V diag(1/(1+λ²)) Vᵀ`.
fn posterior_covariance(model: &PpcaModel) -> DMatrix<f64> {
    spectral_latent(model, |l| 1.0 / (1.0 + l * l))
}

/// `((1−α)I + α V diag(1+λ²) Vᵀ)⁻¹ = V diag(1/(1 + αλ²)) Vᵀ`.
fn optimal_covariance(model: &PpcaModel, a: f64) -> DMatrix<f64> {
    spectral_latent(model, |l| 1.0 / (1.0 + a * l * l))
}

fn spectral_latent(model: &PpcaModel, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let s = model.spectrum();
    let v = s.right_vectors();
    let d = s.singular_values().map(f);
    linalg::symmetrize(&(v * DMatrix::from_diagonal(&d) * v.transpose()))
}

/// `V*(y|x) = c_α q^{1−α} W^α`, with precision `(1−α)I + αΣ_W⁻¹` and mean
/// `Σ_{V*} αΣ_W⁻¹ μ_W`.
pub fn optimal_encoder(
    model: &PpcaModel,
    x: &DVector<f64>,
    order: RenyiOrder,
) -> Result<GaussianN> {
    let a = order.require_unit_interval()?.value();
    let w = model.posterior(x)?;
    let w_precision = linalg::spd_inverse(w.covariance())?;
    let precision = DMatrix::identity(model.n_y(), model.n_y()) * (1.0 - a) + &w_precision * a;
    let cov = linalg::spd_inverse(&linalg::symmetrize(&precision))?;
    let mean = &cov * (&w_precision * w.mean()) * a;
    GaussianN::new(mean, cov)
}

/// `c_α(x) = [∫ q^{1−α}(y) W^α(y|x) dy]⁻¹` by completing the square:
/// with `P = Σ_W⁻¹`, `A = (1−α)I + αP` and `b = αPμ_W`,
/// `log ∫ = −½ log|A| − (α/2) log|Σ_W| + ½ bᵀA⁻¹b − (α/2) μ_WᵀPμ_W`.
pub fn c_alpha(model: &PpcaModel, x: &DVector<f64>, order: RenyiOrder) -> Result<f64> {
    Ok(log_c_alpha(model, x, order)?.exp())
}

/// `log c_α(x)`.
pub fn log_c_alpha(model: &PpcaModel, x: &DVector<f64>, order: RenyiOrder) -> Result<f64> {
    let a = order.require_unit_interval()?.value();
    let w = model.posterior(x)?;
    let chol_w = linalg::cholesky(w.covariance())?;
    let p = linalg::spd_inverse(w.covariance())?;
    let big_a =
        linalg::symmetrize(&(DMatrix::identity(model.n_y(), model.n_y()) * (1.0 - a) + &p * a));
    let chol_a = linalg::cholesky(&big_a)?;
    let b = &p * w.mean() * a;
    let log_integral = -0.5 * linalg::log_det_cholesky(&chol_a)
        - 0.5 * a * linalg::log_det_cholesky(&chol_w)
        + 0.5 * linalg::inv_quad_form(&chol_a, &b)
        - 0.5 * a * linalg::inv_quad_form(&chol_w, w.mean());
    Ok(-log_integral)
}

/// `E_{y~V(y|x)} log N(x; Cy, σ²I)
///  = −(N_x/2) log(2πσ²) − (|x − Cm|² + tr(CᵀC S)) / (2σ²)`.
pub fn reconstruction_term(
    encoder: &GaussianEncoder,
    model: &PpcaModel,
    x: &DVector<f64>,
) -> Result<f64> {
    check_encoder(encoder, model)?;
    model.check_x(x)?;
    let v = encoder.at(x)?;
    let c = model.loading();
    let s2 = model.noise_std().powi(2);
    let resid = x - c * v.mean();
    let spread = (c.transpose() * c * v.covariance()).trace();
    Ok(-0.5 * model.n_x() as f64 * (LN_2PI + s2.ln())
        - (resid.norm_squared() + spread) / (2.0 * s2))
}

/// All bound terms for one encoder, observation and order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub reconstruction: f64,
    /// `D[V‖q]`.
    pub kl_regularizer: f64,
    /// `((1−α)/α) D_α[W‖q] = D_{1−α}[q‖W]`.
    pub renyi_regularizer: f64,
    pub relbo: f64,
    pub selbo: f64,
    pub beta_elbo: f64,
    pub log_evidence: f64,
    /// `D[V‖V*]`.
    pub gap: f64,
    /// `(log p − gap/α) − relbo`; vanishes identically.
    pub identity_residual: f64,
    /// `(log p − gap) − relbo`, the identity without the `1/α` on the gap.
    /// Vanishes only at `V = V*`.
    pub unscaled_gap_residual: f64,
}

/// Assembles every bound term for the encoder at `x`.
pub fn bound_report(
    encoder: &GaussianEncoder,
    model: &PpcaModel,
    x: &DVector<f64>,
    order: RenyiOrder,
    beta: f64,
) -> Result<BoundReport> {
    let a = order.require_unit_interval()?.value();
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "β must be positive, got {beta}"
        )));
    }
    check_encoder(encoder, model)?;
    let v = encoder.at(x)?;
    let q = GaussianN::standard(model.n_y());
    let reconstruction = reconstruction_term(encoder, model, x)?;
    let kl = kl_divergence_gaussian(&v, &q)?;
    let renyi = renyi_regularizer(model, x, order)?.total_corrected;
    let log_evidence = model.log_evidence(x)?;
    let gap = kl_divergence_gaussian(&v, &optimal_encoder(model, x, order)?)?;
    let relbo = reconstruction - kl / a + renyi;
    Ok(BoundReport {
        reconstruction,
        kl_regularizer: kl,
        renyi_regularizer: renyi,
        relbo,
        selbo: reconstruction - kl,
        beta_elbo: reconstruction - beta * kl,
        log_evidence,
        gap,
        identity_residual: (log_evidence - gap / a) - relbo,
        unscaled_gap_residual: (log_evidence - gap) - relbo,
    })
}

/// `D[V‖p(y)] − D[V‖p(y|x)]`, the term separating the β-ELBO from a bound;
/// its sign is not fixed.
pub fn beta_failure_term(
    encoder: &GaussianEncoder,
    model: &PpcaModel,
    x: &DVector<f64>,
) -> Result<f64> {
    check_encoder(encoder, model)?;
    let v = encoder.at(x)?;
    let prior = GaussianN::standard(model.n_y());
    Ok(kl_divergence_gaussian(&v, &prior)? - kl_divergence_gaussian(&v, &model.posterior(x)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::renyi_divergence_gaussian;
    use crate::ppca::fixtures::random_model;
    use crate::quadrature::integrate_adaptive;
    use nalgebra::{dmatrix, dvector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn order(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    #[test]
    fn optimal_encoder_tends_to_posterior() {
        let (m, x) = random_model(7, 3, 1);
        let w = m.posterior(&x).unwrap();
        let mut last = f64::INFINITY;
        for a in [0.9, 0.99, 0.999, 0.999_999] {
            let v = optimal_encoder(&m, &x, order(a)).unwrap();
            let err = (v.mean() - w.mean())
                .amax()
                .max((v.covariance() - w.covariance()).amax());
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn decoupled_optimum_is_prior() {
        let m = PpcaModel::decoupled(4, 2, 1.0).unwrap();
        let x = dvector![0.3, -1.0, 2.0, 0.1];
        for a in [0.2, 0.7] {
            let v = optimal_encoder(&m, &x, order(a)).unwrap();
            assert!(v.mean().amax() < 1e-15);
            assert!((v.covariance() - DMatrix::identity(2, 2)).amax() < 1e-15);
            assert!((c_alpha(&m, &x, order(a)).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn encoder_map_matches_pointwise_optimum() {
        let (m, x) = random_model(9, 3, 4);
        for a in [0.3, 0.8] {
            let direct = optimal_encoder(&m, &x, order(a)).unwrap();
            let mapped = GaussianEncoder::optimal(&m, order(a))
                .unwrap()
                .at(&x)
                .unwrap();
            assert!((direct.mean() - mapped.mean()).amax() < 1e-12);
            assert!((direct.covariance() - mapped.covariance()).amax() < 1e-12);
        }
        let w = m.posterior(&x).unwrap();
        let enc = GaussianEncoder::posterior(&m).at(&x).unwrap();
        assert!((w.mean() - enc.mean()).amax() < 1e-12);
    }

    #[test]
    fn optimal_density_is_normalised_geometric_mixture() {
        let m = PpcaModel::new(dmatrix![1.2; -0.4; 0.9], 0.7).unwrap();
        let x = dvector![0.5, 0.2, -1.1];
        let w = m.posterior(&x).unwrap();
        let q = GaussianN::standard(1);
        for a in [0.25, 0.6] {
            let v = optimal_encoder(&m, &x, order(a)).unwrap();
            let log_c = log_c_alpha(&m, &x, order(a)).unwrap();
            for k in 0..41 {
                let y = dvector![-4.0 + 0.2 * k as f64];
                let mix = log_c + (1.0 - a) * q.log_pdf(&y).unwrap() + a * w.log_pdf(&y).unwrap();
                assert!((mix.exp() - v.log_pdf(&y).unwrap().exp()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn c_alpha_matches_quadrature_and_divergence() {
        let m = PpcaModel::new(dmatrix![2.0; 1.0], 0.8).unwrap();
        let x = dvector![1.5, -0.3];
        let w = m.posterior(&x).unwrap();
        let q = GaussianN::standard(1);
        for a in [0.1, 0.5, 0.9] {
            let f = |y: f64| {
                let y = dvector![y];
                ((1.0 - a) * q.log_pdf(&y).unwrap() + a * w.log_pdf(&y).unwrap()).exp()
            };
            let est = integrate_adaptive(f, -15.0, 15.0, 1e-15, 1e-14, 2000);
            let c = c_alpha(&m, &x, order(a)).unwrap();
            assert!((c - 1.0 / est.value).abs() < 1e-9);
            let d = renyi_divergence_gaussian(&w, &q, order(a)).unwrap();
            assert!((c.ln() / (1.0 - a) - d).abs() < 1e-12);
        }
        let near_one = c_alpha(&m, &x, order(1.0 - 1e-9)).unwrap();
        assert!((near_one - 1.0).abs() < 1e-8);
    }

    #[test]
    fn reconstruction_matches_monte_carlo() {
        let (m, x) = random_model(5, 2, 6);
        let enc = GaussianEncoder::posterior(&m).perturbed(0.3, &mut ChaCha8Rng::seed_from_u64(2));
        let v = enc.at(&x).unwrap();
        let chol = linalg::cholesky(v.covariance()).unwrap();
        let l = chol.l();
        let decoder = |y: &DVector<f64>| {
            let r = &x - m.loading() * y;
            -0.5 * m.n_x() as f64 * (LN_2PI + 2.0 * m.noise_std().ln())
                - r.norm_squared() / (2.0 * m.noise_std().powi(2))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 1_000_000;
        let (mut mean, mut m2) = (0.0, 0.0);
        for k in 0..n {
            let z = DVector::from_fn(2, |_, _| StandardNormal.sample(&mut rng));
            let val = decoder(&(v.mean() + &l * z));
            let d = val - mean;
            mean += d / (k + 1) as f64;
            m2 += d * (val - mean);
        }
        let se = (m2 / (n - 1) as f64 / n as f64).sqrt();
        let exact = reconstruction_term(&enc, &m, &x).unwrap();
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "{mean} vs {exact} (se {se})"
        );
    }

    #[test]
    fn reconstruction_point_mass_and_noise_scaling() {
        let m = PpcaModel::new(dmatrix![1.0; 2.0], 0.5).unwrap();
        let x = dvector![1.0, 2.0];
        let post = m.posterior(&x).unwrap();
        let point =
            GaussianEncoder::new(DMatrix::zeros(1, 2), post.mean().clone(), dmatrix![1e-12])
                .unwrap();
        let r = &x - m.loading() * post.mean();
        let direct = -(2.0 * std::f64::consts::PI * 0.25).ln() - r.norm_squared() / (2.0 * 0.25);
        assert!((reconstruction_term(&point, &m, &x).unwrap() - direct).abs() < 1e-10);

        // Doubling σ with x, C and V fixed: the log-normaliser drops by
        // N_x log 2 and the quadratic part shrinks by a factor of 4.
        let wide = PpcaModel::new(dmatrix![1.0; 2.0], 1.0).unwrap();
        let enc = GaussianEncoder::posterior(&m);
        let narrow = reconstruction_term(&enc, &m, &x).unwrap();
        let broad = reconstruction_term(&enc, &wide, &x).unwrap();
        let quad = -(narrow + (2.0 * std::f64::consts::PI * 0.25).ln());
        assert!((broad - (narrow - 2.0 * 2f64.ln() + 0.75 * quad)).abs() < 1e-12);
    }

    #[test]
    fn identity_holds_for_random_encoders() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..6 {
            let (m, x) = random_model(8, 3, 40 + seed);
            for a in [0.1, 0.5, 0.9] {
                let star = GaussianEncoder::optimal(&m, order(a)).unwrap();
                let r = bound_report(&star, &m, &x, order(a), 1.0).unwrap();
                assert!(r.identity_residual.abs() < 1e-9 && r.gap.abs() < 1e-12);
                assert!((r.relbo - r.log_evidence).abs() < 1e-9);
                for scale in [0.05, 0.3, 1.0] {
                    let enc = star.perturbed(scale, &mut rng);
                    let r = bound_report(&enc, &m, &x, order(a), 1.0).unwrap();
                    assert!(r.identity_residual.abs() < 1e-9, "{r:?}");
                    assert!(r.relbo <= r.log_evidence + 1e-9);
                    assert!(r.selbo <= r.log_evidence + 1e-9);
                    assert!(r.gap > 0.0);
                }
            }
        }
    }

    #[test]
    fn unscaled_gap_form_fails_away_from_optimum() {
        let (m, x) = random_model(6, 2, 9);
        let enc = GaussianEncoder::optimal(&m, order(0.5))
            .unwrap()
            .perturbed(0.5, &mut ChaCha8Rng::seed_from_u64(1));
        let r = bound_report(&enc, &m, &x, order(0.5), 1.0).unwrap();
        assert!(r.unscaled_gap_residual.abs() > 1e-3);
        assert!((r.unscaled_gap_residual - r.gap).abs() < 1e-9);
    }

    #[test]
    fn gap_grows_with_perturbation() {
        let (m, x) = random_model(6, 2, 12);
        let star = GaussianEncoder::optimal(&m, order(0.4)).unwrap();
        let gaps: Vec<f64> = [0.0, 0.1, 0.5, 1.0]
            .iter()
            .map(|&s| {
                let enc = star.perturbed(s, &mut ChaCha8Rng::seed_from_u64(5));
                bound_report(&enc, &m, &x, order(0.4), 1.0).unwrap().gap
            })
            .collect();
        assert!(gaps[0].abs() < 1e-12);
        assert!(gaps.windows(2).all(|w| w[1] > w[0]), "{gaps:?}");
    }

    #[test]
    fn relbo_tends_to_selbo() {
        let (m, x) = random_model(6, 2, 13);
        let enc = GaussianEncoder::posterior(&m).perturbed(0.4, &mut ChaCha8Rng::seed_from_u64(8));
        let r = bound_report(&enc, &m, &x, order(1.0 - 1e-8), 1.0).unwrap();
        assert!((r.relbo - r.selbo).abs() < 1e-6);
    }

    #[test]
    fn beta_elbo_can_exceed_evidence() {
        let (m, x) = random_model(6, 2, 14);
        let r = bound_report(&GaussianEncoder::posterior(&m), &m, &x, order(0.5), 0.5).unwrap();
        assert!(r.beta_elbo > r.log_evidence);
        assert!((r.selbo - r.log_evidence).abs() < 1e-9);
    }

    #[test]
    fn failure_term_sign_and_limits() {
        let (m, x) = random_model(6, 2, 15);
        let post = GaussianEncoder::posterior(&m);
        let positive = beta_failure_term(&post, &m, &x).unwrap();
        let prior = GaussianEncoder::constant(&GaussianN::standard(2), 6);
        let negative = beta_failure_term(&prior, &m, &x).unwrap();
        assert!(positive > 1e-3 && negative < -1e-3);
        // At the posterior the term is the pointwise KL D[W‖p(y)].
        let w = m.posterior(&x).unwrap();
        let kl = kl_divergence_gaussian(&w, &GaussianN::standard(2)).unwrap();
        assert!((positive - kl).abs() < 1e-12);

        let flat = PpcaModel::decoupled(6, 2, 1.0).unwrap();
        assert!(
            beta_failure_term(
                &post.perturbed(0.0, &mut ChaCha8Rng::seed_from_u64(0)),
                &flat,
                &x
            )
            .unwrap()
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn invalid_inputs() {
        let (m, x) = random_model(4, 2, 16);
        let enc = GaussianEncoder::posterior(&m);
        assert!(bound_report(&enc, &m, &x, order(1.5), 1.0).is_err());
        assert!(bound_report(&enc, &m, &x, order(0.5), 0.0).is_err());
        let (other, _) = random_model(5, 2, 17);
        assert!(bound_report(
            &enc,
            &other,
            &dvector![0.0, 0.0, 0.0, 0.0, 0.0],
            order(0.5),
            1.0
        )
        .is_err());
    }
}
