//! Bound terms across orders, β and perturbations of the optimal encoder.

use std::fs;

use anyhow::{bail, Context, Result};
use rand::Rng;
use relbo_core::ppca::fixtures::random_model;
use relbo_core::relbo::bound_report;
use relbo_core::{GaussianEncoder, PpcaModel};

use crate::config::RunConfig;
use crate::output::{num, path, write_csv};
use crate::Status;

pub const IDENTITY_CHECK: &str = "relbo_identity";
pub const EVIDENCE_CHECK: &str = "relbo_below_evidence";

const HEADER: [&str; 15] = [
    "alpha",
    "beta",
    "scale",
    "x_index",
    "reconstruction",
    "kl_regularizer",
    "renyi_regularizer",
    "relbo",
    "selbo",
    "beta_elbo",
    "log_evidence",
    "gap",
    "identity_residual",
    "unscaled_gap_residual",
    "beta_elbo_exceeds_evidence",
];

fn load_model(cfg: &RunConfig) -> Result<PpcaModel> {
    let settings = &cfg.file.relbo;
    if let Some(file) = &settings.model {
        let text =
            fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
        return Ok(PpcaModel::from_json(&text)?);
    }
    if !(1..=settings.n_x).contains(&settings.n_y) {
        bail!(
            "need 1 ≤ n_y ≤ n_x, got n_x = {}, n_y = {}",
            settings.n_x,
            settings.n_y
        );
    }
    Ok(random_model(settings.n_x, settings.n_y, cfg.stream(4).gen()).0)
}

pub fn run(cfg: &RunConfig) -> Result<Status> {
    let settings = &cfg.file.relbo;
    if settings.betas.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        bail!("every β must be positive");
    }
    if settings
        .scales
        .iter()
        .any(|s| !(s.is_finite() && *s >= 0.0))
    {
        bail!("perturbation scales must be non-negative");
    }
    let orders = cfg.unit_orders()?;
    let model = load_model(cfg)?;
    let data = model.sample_data(settings.x_count, cfg.stream(5).gen());
    let identity_tol = cfg.tolerance_for(IDENTITY_CHECK, 1e-9);
    let evidence_tol = cfg.tolerance_for(EVIDENCE_CHECK, 1e-9);

    let mut rows = Vec::new();
    let (mut worst_identity, mut worst_excess, mut flagged) = (0.0f64, f64::NEG_INFINITY, 0usize);
    for (ai, &order) in orders.iter().enumerate() {
        let optimal = GaussianEncoder::optimal(&model, order)?;
        for (si, &scale) in settings.scales.iter().enumerate() {
            let encoder = if scale == 0.0 {
                optimal.clone()
            } else {
                optimal.perturbed(
                    scale,
                    &mut cfg.stream(1000 + (ai * settings.scales.len() + si) as u64),
                )
            };
            for &beta in &settings.betas {
                for (i, x) in data.row_iter().enumerate() {
                    let r = bound_report(&encoder, &model, &x.transpose(), order, beta)?;
                    let exceeds = r.beta_elbo > r.log_evidence;
                    worst_identity = worst_identity.max(r.identity_residual.abs());
                    worst_excess = worst_excess.max(r.relbo - r.log_evidence);
                    flagged += usize::from(exceeds);
                    rows.push(vec![
                        num(order.value()),
                        num(beta),
                        num(scale),
                        i.to_string(),
                        num(r.reconstruction),
                        num(r.kl_regularizer),
                        num(r.renyi_regularizer),
                        num(r.relbo),
                        num(r.selbo),
                        num(r.beta_elbo),
                        num(r.log_evidence),
                        num(r.gap),
                        num(r.identity_residual),
                        num(r.unscaled_gap_residual),
                        exceeds.to_string(),
                    ]);
                }
            }
        }
    }
    write_csv(&path(&cfg.out, "relbo.csv"), &HEADER, &rows)?;
    println!(
        "{} rows: max |identity residual| {worst_identity:.3e}, max relbo − log evidence {worst_excess:.3e}, \
         {flagged} rows with beta_elbo > log evidence",
        rows.len()
    );
    Ok(Status::from_pass(
        worst_identity < identity_tol && worst_excess <= evidence_tol,
    ))
}
