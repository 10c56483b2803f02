//! The Gaussian-model landscape sweep and its per-panel summary.

use anyhow::Result;
use rayon::prelude::*;
use relbo_core::gm::{summarize_panels, sweep_point, GmSweepPoint, PanelSummary};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{num, opt, path, write_csv, write_json};
use crate::Status;

pub const CHECK: &str = "gm_closed_vs_quadrature";

const HEADER: [&str; 8] = [
    "alpha",
    "rho_sq",
    "var_ratio",
    "mean_gap",
    "feasible",
    "value",
    "oracle_value",
    "abs_diff",
];

#[derive(Debug, Serialize)]
struct OrderCount {
    alpha: f64,
    negative: usize,
    feasible: usize,
}

#[derive(Debug, Serialize)]
struct Summary {
    cells: usize,
    max_abs_diff: f64,
    tolerance: f64,
    by_order: Vec<OrderCount>,
    panels: Vec<PanelSummary>,
}

pub fn run(cfg: &RunConfig) -> Result<Status> {
    let grid = cfg.gm_grid()?;
    let mut cells = Vec::with_capacity(grid.len());
    for &a in &grid.alphas {
        for &r in &grid.rho_sq {
            for &v in &grid.var_ratios {
                for &g in &grid.mean_gaps {
                    cells.push((a, r, v, g));
                }
            }
        }
    }
    let points: Vec<GmSweepPoint> = cells
        .par_iter()
        .map(|&(a, r, v, g)| sweep_point(&grid, a, r, v, g))
        .collect::<relbo_core::Result<_>>()?;

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                num(p.alpha),
                num(p.rho_sq),
                num(p.var_ratio),
                num(p.mean_gap),
                p.feasible.to_string(),
                opt(p.value),
                opt(p.oracle_value),
                opt(p.abs_diff()),
            ]
        })
        .collect();
    write_csv(&path(&cfg.out, "gm_sweep.csv"), &HEADER, &rows)?;

    let tolerance = cfg.tolerance_for(CHECK, 1e-7);
    let max_abs_diff = points
        .iter()
        .filter_map(GmSweepPoint::abs_diff)
        .fold(0.0, f64::max);
    let by_order: Vec<OrderCount> = grid
        .alphas
        .iter()
        .map(|&alpha| OrderCount {
            alpha,
            negative: points
                .iter()
                .filter(|p| p.alpha == alpha && p.is_negative())
                .count(),
            feasible: points
                .iter()
                .filter(|p| p.alpha == alpha && p.feasible)
                .count(),
        })
        .collect();
    for c in &by_order {
        println!(
            "alpha {:<6} negative {:>4} of {:>4} feasible cells",
            c.alpha, c.negative, c.feasible
        );
    }
    println!("max |closed − quadrature| {max_abs_diff:.3e} (tolerance {tolerance:.1e})");
    let summary = Summary {
        cells: points.len(),
        max_abs_diff,
        tolerance,
        by_order,
        panels: summarize_panels(&points),
    };
    write_json(&path(&cfg.out, "gm_summary.json"), &summary)?;
    Ok(Status::from_pass(max_abs_diff <= tolerance))
}
