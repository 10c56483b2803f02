//! The two-state counterexample: `F_α` along `q(0) = s(0) p_Y(0)` and a
//! grid search over priors.

use anyhow::{bail, Result};
use relbo_core::dichotomic::{limit_scan, minimize_over_prior, DichotomicJoint, LimitRow};
use relbo_core::RenyiOrder;

use crate::config::RunConfig;
use crate::output::{num, path, write_csv};
use crate::Status;

const HEADER: [&str; 5] = [
    "s0",
    "f_alpha",
    "f_alpha_plus_log_s0",
    "argmin_q0",
    "departs",
];

pub fn run(cfg: &RunConfig, emit_csv: bool) -> Result<Status> {
    let settings = &cfg.file.dichotomic;
    let alpha = match cfg.alphas.as_deref() {
        None => 0.5,
        Some([a]) => *a,
        Some(_) => bail!("dichotomic takes a single order"),
    };
    let order = RenyiOrder::new(alpha)?.require_unit_interval()?;
    let joint = match settings.joint {
        Some(j) => DichotomicJoint::new(j)?,
        None => DichotomicJoint::rare_outcome(),
    };

    let mut rows: Vec<LimitRow> = Vec::new();
    for &s0 in &settings.s0 {
        match limit_scan(&joint, order, &[s0]) {
            Ok(r) => rows.extend(r),
            Err(relbo_core::Error::InadmissibleS0 { s0, q0 }) => {
                eprintln!("skipping s0 = {s0:e}: q(0) = {q0} is not a probability");
            }
            Err(e) => return Err(e.into()),
        }
    }
    let search = minimize_over_prior(&joint, order, settings.grid_size)?;

    println!("alpha = {alpha}, p_Y(0) = {:.6e}", search.marginal_q0);
    println!("{:>12} {:>24} {:>24}", "s0", "F_alpha", "F_alpha + log s0");
    for r in &rows {
        println!(
            "{:>12.4e} {:>24.16e} {:>24.16e}",
            r.s0, r.f_alpha, r.f_alpha_plus_log_s0
        );
    }
    println!(
        "argmin q(0) = {:.6e} (grid step {:.1e}), F_alpha there = {:.6e}, departs = {}",
        search.best_q0,
        search.grid_step,
        search.best_value - search.value_at_marginal,
        search.departs
    );

    if emit_csv {
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    num(r.s0),
                    num(r.f_alpha),
                    num(r.f_alpha_plus_log_s0),
                    num(search.best_q0),
                    search.departs.to_string(),
                ]
            })
            .collect();
        write_csv(&path(&cfg.out, "dichotomic.csv"), &HEADER, &table)?;
    }
    Ok(Status::from_pass(search.departs))
}
