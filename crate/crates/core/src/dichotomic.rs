//! Two-by-two joint distributions on which the Rényi mutual-information
//! objective can be evaluated exactly, to ask whether the true marginal
//! `P_Y` minimises it over priors `Q_Y`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::divergence::{kl_divergence_discrete, mixed_discrete, renyi_divergence_discrete};
use crate::{DiscreteDist, Error, RenyiOrder, Result};

/// Tolerance on the total mass of a joint.
pub const JOINT_SUM_TOLERANCE: f64 = 1e-12;

/// Improvement below which a grid minimum is not counted as beating `P_Y`.
pub const DEPARTURE_THRESHOLD: f64 = 1e-9;

/// A joint `p(x, y)` on `{0,1}²`, indexed `[x][y]`, with strictly positive
/// marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomicJoint {
    joint: [[f64; 2]; 2],
}

impl DichotomicJoint {
    pub fn new(joint: [[f64; 2]; 2]) -> Result<Self> {
        let flat = joint.iter().flatten();
        if flat.clone().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidDistribution(
                "joint entries must be non-negative".into(),
            ));
        }
        let total: f64 = flat.sum();
        if (total - 1.0).abs() > JOINT_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("joint sums to {total}")));
        }
        let j = Self { joint };
        if j.p_x().iter().chain(j.p_y().iter()).any(|m| *m <= 0.0) {
            return Err(Error::InvalidDistribution(
                "marginals must be strictly positive".into(),
            ));
        }
        Ok(j)
    }

    /// `p(x, y) = p_X(x) W(y|x)` from `p_X` and `W(0|x)` for `x = 0, 1`.
    pub fn from_conditionals(p_x: [f64; 2], w0: [f64; 2]) -> Result<Self> {
        if w0.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidDistribution(
                "W(0|x) must lie in [0, 1]".into(),
            ));
        }
        Self::new([
            [p_x[0] * w0[0], p_x[0] * (1.0 - w0[0])],
            [p_x[1] * w0[1], p_x[1] * (1.0 - w0[1])],
        ])
    }

    /// `p(x, y) = p_X(x) p_Y(y)`.
    pub fn independent(p_x: [f64; 2], p_y: [f64; 2]) -> Result<Self> {
        Self::new([
            [p_x[0] * p_y[0], p_x[0] * p_y[1]],
            [p_x[1] * p_y[0], p_x[1] * p_y[1]],
        ])
    }

    /// `p_X = (½, ½)`, `W(0|0) = 0.01`, `W(0|1) = 0.001`: a rare `y = 0`, so
    /// that priors with `s(0) = q(0)/p_Y(0) ≫ 1` exist.
    pub fn rare_outcome() -> Self {
        Self::from_conditionals([0.5, 0.5], [0.01, 0.001]).expect("valid construction")
    }

    /// Entries drawn uniformly from `[0.01, 1)` and normalised.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let w: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.01..1.0));
        let t: f64 = w.iter().sum();
        let mut j = [[w[0] / t, w[1] / t], [w[2] / t, w[3] / t]];
        // Absorb rounding so the sum check holds exactly.
        j[1][1] = 1.0 - j[0][0] - j[0][1] - j[1][0];
        Self::new(j).expect("positive entries")
    }

    pub fn joint(&self) -> [[f64; 2]; 2] {
        self.joint
    }

    pub fn p_x(&self) -> [f64; 2] {
        [
            self.joint[0][0] + self.joint[0][1],
            self.joint[1][0] + self.joint[1][1],
        ]
    }

    pub fn p_y(&self) -> [f64; 2] {
        [
            self.joint[0][0] + self.joint[1][0],
            self.joint[0][1] + self.joint[1][1],
        ]
    }

    pub fn marginal_y(&self) -> DiscreteDist {
        DiscreteDist::from_weights(&self.p_y()).expect("positive marginal")
    }

    /// `W(·|x)`.
    pub fn conditional(&self, x: usize) -> DiscreteDist {
        DiscreteDist::from_weights(&self.joint[x]).expect("positive marginal")
    }

    /// `I(X; Y)` in nats.
    pub fn mutual_information(&self) -> f64 {
        let (px, py) = (self.p_x(), self.p_y());
        let mut total = 0.0;
        for (x, row) in self.joint.iter().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    total += p * (p / (px[x] * py[y])).ln();
                }
            }
        }
        total
    }
}

fn check_prior(prior: &DiscreteDist) -> Result<()> {
    if prior.support_size() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: prior.support_size(),
        });
    }
    if !prior.is_strictly_positive() {
        return Err(Error::InvalidDistribution(
            "prior must be strictly positive".into(),
        ));
    }
    Ok(())
}

/// `Σ_x p(x) D_α[W(·|x) ‖ q]`, the objective minimised over priors.
pub fn prior_objective(
    joint: &DichotomicJoint,
    prior: &DiscreteDist,
    order: RenyiOrder,
) -> Result<f64> {
    check_prior(prior)?;
    let px = joint.p_x();
    let mut total = 0.0;
    for (x, &w) in px.iter().enumerate() {
        total += w * renyi_divergence_discrete(&joint.conditional(x), prior, order)?;
    }
    Ok(total)
}

/// `F_α = Σ_x p(x)(D_α[W(·|x)‖q] − D_α[W(·|x)‖p_Y])`.
pub fn f_alpha(joint: &DichotomicJoint, prior: &DiscreteDist, order: RenyiOrder) -> Result<f64> {
    order.require_unit_interval()?;
    Ok(prior_objective(joint, prior, order)? - prior_objective(joint, &joint.marginal_y(), order)?)
}

/// `F_α` through the tilted conditional: with `s = q/p_Y` and
/// `R(y|x) ∝ W^α(y|x) p_Y^{1−α}(y)`,
/// `F_α = −(1/(1−α)) Σ_x p(x) log Σ_y R(y|x) s(y)^{1−α}`.
pub fn f_alpha_tilted(
    joint: &DichotomicJoint,
    prior: &DiscreteDist,
    order: RenyiOrder,
) -> Result<f64> {
    let a = order.require_unit_interval()?.value();
    check_prior(prior)?;
    let (px, py) = (joint.p_x(), joint.p_y());
    let s = [prior[0] / py[0], prior[1] / py[1]];
    let mut total = 0.0;
    for (x, &px) in px.iter().enumerate() {
        let w = joint.conditional(x);
        let r: [f64; 2] = std::array::from_fn(|y| w[y].powf(a) * py[y].powf(1.0 - a));
        let norm = r[0] + r[1];
        let inner: f64 = (0..2).map(|y| r[y] / norm * s[y].powf(1.0 - a)).sum();
        total += px * inner.ln();
    }
    Ok(-total / (1.0 - a))
}

/// One row of an `s(0)` scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub s0: f64,
    pub f_alpha: f64,
    /// `F_α + log s(0)`, bounded if `F_α ~ −log s(0)`.
    pub f_alpha_plus_log_s0: f64,
}

/// `F_α` at priors with `q(0) = s0 · p_Y(0)`.
pub fn limit_scan(
    joint: &DichotomicJoint,
    order: RenyiOrder,
    s0_values: &[f64],
) -> Result<Vec<LimitRow>> {
    let p0 = joint.p_y()[0];
    s0_values
        .iter()
        .map(|&s0| {
            let q0 = s0 * p0;
            if !(s0 > 0.0 && q0 < 1.0) {
                return Err(Error::InadmissibleS0 { s0, q0 });
            }
            let f = f_alpha(joint, &DiscreteDist::new(vec![q0, 1.0 - q0])?, order)?;
            Ok(LimitRow {
                s0,
                f_alpha: f,
                f_alpha_plus_log_s0: f + s0.ln(),
            })
        })
        .collect()
}

/// Outcome of a grid search over `q(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSearch {
    pub best_q0: f64,
    pub best_value: f64,
    /// Objective at `q = p_Y`.
    pub value_at_marginal: f64,
    pub marginal_q0: f64,
    pub grid_step: f64,
    /// The argmin is more than one step from `p_Y(0)` and improves on it
    /// by more than [`DEPARTURE_THRESHOLD`].
    pub departs: bool,
}

/// Minimises [`prior_objective`] over `q(0) = k/(n+1)`, `k = 1..=n`.
pub fn minimize_over_prior(
    joint: &DichotomicJoint,
    order: RenyiOrder,
    grid_size: usize,
) -> Result<PriorSearch> {
    if grid_size < 101 {
        return Err(Error::InvalidParameter(format!(
            "grid_size {grid_size} < 101"
        )));
    }
    let step = 1.0 / (grid_size + 1) as f64;
    let mut best = (f64::NAN, f64::INFINITY);
    for k in 1..=grid_size {
        let q0 = k as f64 * step;
        let v = prior_objective(joint, &DiscreteDist::new(vec![q0, 1.0 - q0])?, order)?;
        if v < best.1 {
            best = (q0, v);
        }
    }
    let marginal_q0 = joint.p_y()[0];
    let at_marginal = prior_objective(joint, &joint.marginal_y(), order)?;
    Ok(PriorSearch {
        best_q0: best.0,
        best_value: best.1,
        value_at_marginal: at_marginal,
        marginal_q0,
        grid_step: step,
        departs: (best.0 - marginal_q0).abs() > step && best.1 < at_marginal - DEPARTURE_THRESHOLD,
    })
}

/// `Σ_x p(x) D(W(·|x)‖q) − [I(X;Y) + D(p_Y‖q)]`, which vanishes identically.
pub fn shannon_decomposition_residual(
    joint: &DichotomicJoint,
    prior: &DiscreteDist,
) -> Result<f64> {
    check_prior(prior)?;
    let px = joint.p_x();
    let mut lhs = 0.0;
    for (x, &w) in px.iter().enumerate() {
        lhs += w * kl_divergence_discrete(&joint.conditional(x), prior)?;
    }
    Ok(lhs - (joint.mutual_information() + kl_divergence_discrete(&joint.marginal_y(), prior)?))
}

/// Residuals of `D_α(W‖q) = min_R [(α/(1−α)) D(R‖W) + D(R‖q)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalCheck {
    /// `max_x |grid minimum − D_α(W(·|x)‖q)|`.
    pub grid_residual: f64,
    /// `max_x |objective at R = W^α q^{1−α}/Z − D_α(W(·|x)‖q)|`.
    pub optimum_residual: f64,
}

pub fn variational_rep_residual(
    joint: &DichotomicJoint,
    prior: &DiscreteDist,
    order: RenyiOrder,
    grid_size: usize,
) -> Result<VariationalCheck> {
    let a = order.require_unit_interval()?.value();
    check_prior(prior)?;
    if grid_size < 2 {
        return Err(Error::InvalidParameter(
            "grid_size must be at least 2".into(),
        ));
    }
    let objective = |r: &DiscreteDist, w: &DiscreteDist| -> Result<f64> {
        Ok(a / (1.0 - a) * kl_divergence_discrete(r, w)? + kl_divergence_discrete(r, prior)?)
    };
    let mut check = VariationalCheck {
        grid_residual: 0.0,
        optimum_residual: 0.0,
    };
    for x in 0..2 {
        let w = joint.conditional(x);
        let exact = renyi_divergence_discrete(&w, prior, order)?;
        let mut grid_min = f64::INFINITY;
        for k in 0..grid_size {
            let r0 = k as f64 / (grid_size - 1) as f64;
            grid_min = grid_min.min(objective(&DiscreteDist::new(vec![r0, 1.0 - r0])?, &w)?);
        }
        let at_optimum = objective(&mixed_discrete(&w, prior, order)?, &w)?;
        check.grid_residual = check.grid_residual.max((grid_min - exact).abs());
        check.optimum_residual = check.optimum_residual.max((at_optimum - exact).abs());
    }
    Ok(check)
}
