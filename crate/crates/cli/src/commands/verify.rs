//! Every closed form against its independent oracle, one named check each.

use anyhow::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use relbo_core::dichotomic::{
    f_alpha, f_alpha_tilted, shannon_decomposition_residual, variational_rep_residual,
    DichotomicJoint,
};
use relbo_core::divergence::{
    identity_b1_residual, kl_divergence_discrete, oracle_renyi_divergence1,
    renyi_divergence_discrete, renyi_divergence_gaussian, renyi_divergence_gaussian1,
};
use relbo_core::gm::{ibar_closed, sweep, GmGrid};
use relbo_core::ppca::fixtures::random_model;
use relbo_core::ppca::{
    dense_oracle_regularizer, dense_posterior, logdet_term_corrected, renyi_regularizer,
};
use relbo_core::relbo::bound_report;
use relbo_core::{DiscreteDist, Gaussian1, GaussianEncoder, LatentSpectrum, RenyiOrder};
use serde::Serialize;

use crate::config::{RunConfig, UNIT_ORDERS};
use crate::output::{path, write_json};
use crate::Status;

/// Check names with their default tolerances.
pub const CHECKS: [(&str, f64); 16] = [
    ("gaussian_closed_vs_quadrature", 1e-8),
    ("gaussian_self_divergence", 1e-12),
    ("discrete_skew_symmetry", 1e-10),
    ("gaussian_skew_symmetry", 1e-10),
    ("discrete_kl_limit", 1e-3),
    ("mixed_pdf_identity", 1e-11),
    ("ppca_fast_vs_dense", 1e-10),
    ("ppca_posterior_vs_dense", 1e-10),
    ("ppca_evidence_vs_dense", 1e-10),
    ("corrected_logdet_non_negative", 0.0),
    ("relbo_identity", 1e-9),
    ("relbo_below_evidence", 1e-9),
    ("variational_rep_at_optimum", 1e-12),
    ("variational_rep_grid", 1e-4),
    ("gm_closed_vs_quadrature", 1e-7),
    ("dichotomic_routes_and_decomposition", 1e-12),
];

#[derive(Debug, Serialize)]
struct CheckResult {
    check: &'static str,
    max_error: f64,
    tolerance: f64,
    pass: bool,
}

fn order(a: f64) -> RenyiOrder {
    RenyiOrder::new(a).expect("fixed orders are valid")
}

fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> DiscreteDist {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    DiscreteDist::from_weights(&w).expect("positive weights")
}

fn random_gaussian1(rng: &mut ChaCha8Rng) -> Gaussian1 {
    Gaussian1::new(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..10.0)).expect("positive variance")
}

/// Worst error of each check, in [`CHECKS`] order.
fn measure(cfg: &RunConfig) -> Result<Vec<f64>> {
    let mut rng = cfg.stream(1);
    let mut errors = Vec::with_capacity(CHECKS.len());

    let (mut quad, mut self_div) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (p, q) = (random_gaussian1(&mut rng), random_gaussian1(&mut rng));
        for a in UNIT_ORDERS {
            let closed = renyi_divergence_gaussian1(&p, &q, order(a))?;
            quad =
                quad.max((closed - oracle_renyi_divergence1(&p, &q, order(a), 4000)?.value).abs());
            self_div = self_div.max(renyi_divergence_gaussian1(&p, &p, order(a))?.abs());
        }
    }
    errors.extend([quad, self_div]);

    let (mut discrete_skew, mut gaussian_skew, mut limit) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let (p, q) = (random_dist(&mut rng, n), random_dist(&mut rng, n));
        let (gp, gq) = (
            random_gaussian1(&mut rng).to_multivariate(),
            random_gaussian1(&mut rng).to_multivariate(),
        );
        for a in UNIT_ORDERS {
            let d = renyi_divergence_discrete(&p, &q, order(a))?;
            let partner = renyi_divergence_discrete(&q, &p, order(1.0 - a))?;
            discrete_skew =
                discrete_skew.max(((1.0 - a) / a * d - partner).abs() / partner.max(1e-300));
            let d = renyi_divergence_gaussian(&gp, &gq, order(a))?;
            let partner = renyi_divergence_gaussian(&gq, &gp, order(1.0 - a))?;
            gaussian_skew =
                gaussian_skew.max(((1.0 - a) / a * d - partner).abs() / partner.max(1e-300));
        }
        let kl = kl_divergence_discrete(&p, &q)?;
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            limit = limit.max((renyi_divergence_discrete(&p, &q, order(a))? - kl).abs() / kl);
        }
    }
    errors.extend([discrete_skew, gaussian_skew, limit]);

    let mut mixed = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=8);
        let (r, p, q) = (
            random_dist(&mut rng, n),
            random_dist(&mut rng, n),
            random_dist(&mut rng, n),
        );
        mixed =
            mixed.max(identity_b1_residual(&r, &p, &q, order(rng.gen_range(0.05..0.95)))?.abs());
    }
    errors.push(mixed);

    let (mut fast, mut posterior, mut evidence, mut negative_logdet) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut identity, mut excess) = (0.0f64, 0.0f64);
    for m in 0..20 {
        let n_x = rng.gen_range(2..=32);
        let n_y = rng.gen_range(1..=n_x.min(6));
        let (model, x) = random_model(n_x, n_y, rng.gen());
        for a in UNIT_ORDERS {
            let dense = dense_oracle_regularizer(&model, &x, order(a))?;
            let spectral = renyi_regularizer(&model, &x, order(a))?.total_corrected;
            fast = fast.max((spectral - dense).abs() / dense.abs().max(1.0));
            negative_logdet =
                negative_logdet.max(-logdet_term_corrected(model.spectrum(), order(a))?);
        }
        let (w, w_dense) = (model.posterior(&x)?, dense_posterior(&model, &x)?);
        posterior = posterior.max(
            (w.mean() - w_dense.mean())
                .amax()
                .max((w.covariance() - w_dense.covariance()).amax()),
        );
        let lp = model.log_evidence(&x)?;
        evidence = evidence.max((lp - model.marginal()?.log_pdf(&x)?).abs() / lp.abs().max(1.0));
        if m < 10 {
            for a in [0.1, 0.5, 0.9] {
                let optimal = GaussianEncoder::optimal(&model, order(a))?;
                for k in 0..6 {
                    let enc = if k == 0 {
                        optimal.clone()
                    } else {
                        optimal.perturbed(0.3 * k as f64, &mut rng)
                    };
                    let r = bound_report(&enc, &model, &x, order(a), 1.0)?;
                    identity = identity.max(r.identity_residual.abs());
                    excess = excess.max(r.relbo - r.log_evidence);
                }
            }
        }
    }
    let many = LatentSpectrum::from_singular_values(&[1e-3, 0.5, 3.0, 40.0])?;
    for a in UNIT_ORDERS {
        negative_logdet = negative_logdet.max(-logdet_term_corrected(&many, order(a))?);
    }
    errors.extend([fast, posterior, evidence, negative_logdet, identity, excess]);

    let (mut at_opt, mut grid_res, mut routes) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let joint = DichotomicJoint::random(&mut rng);
        let q0 = rng.gen_range(0.05..0.95);
        let prior = DiscreteDist::new(vec![q0, 1.0 - q0])?;
        let a = order(rng.gen_range(0.1..0.9));
        let c = variational_rep_residual(&joint, &prior, a, 10_001)?;
        at_opt = at_opt.max(c.optimum_residual);
        grid_res = grid_res.max(c.grid_residual);
        routes = routes
            .max((f_alpha(&joint, &prior, a)? - f_alpha_tilted(&joint, &prior, a)?).abs())
            .max(shannon_decomposition_residual(&joint, &prior)?.abs());
    }

    let grid = GmGrid::default();
    let points = sweep(&grid)?;
    let mut gm = points
        .iter()
        .filter_map(|p| p.abs_diff())
        .fold(0.0, f64::max);
    for &a in &grid.alphas {
        let zero = ibar_closed(order(a), &grid.baseline, &grid.baseline.marginal_prior())?;
        gm = gm.max(zero.abs());
    }
    errors.extend([at_opt, grid_res, gm, routes]);
    debug_assert_eq!(errors.len(), CHECKS.len());
    Ok(errors)
}

pub fn run(cfg: &RunConfig) -> Result<Status> {
    let errors = measure(cfg)?;
    let results: Vec<CheckResult> = CHECKS
        .iter()
        .zip(errors)
        .map(|(&(check, default), max_error)| {
            let tolerance = cfg.tolerance_for(check, default);
            CheckResult {
                check,
                max_error,
                tolerance,
                pass: max_error <= tolerance,
            }
        })
        .collect();
    for r in &results {
        println!(
            "{} {:<38} max_error {:.3e}  tolerance {:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.check,
            r.max_error,
            r.tolerance
        );
    }
    write_json(&path(&cfg.out, "verify.json"), &results)?;
    Ok(Status::from_pass(results.iter().all(|r| r.pass)))
}
