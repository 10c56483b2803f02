//! The bivariate-Gaussian landscape of the Rényi mutual-information
//! objective as a function of the prior `Q_Y = N(μ_{y,q}, σ_{y,q}²)`.
//!
//! For a jointly Gaussian `(x, y)` with correlation `ρ` the conditional is
//! `W(y|x) = N(μ_c(x), σ_c²)` with `σ_c² = (1−ρ²)σ_y²`, and
//!
//! `Ī_α = E_x[D_α(W(·|x) ‖ Q_Y) − D_α(W(·|x) ‖ P_Y)]`.
//!
//! A negative value means some prior beats the true marginal `P_Y`.

use serde::{Deserialize, Serialize};

use crate::divergence::renyi_divergence_gaussian1;
use crate::quadrature::GaussHermite;
use crate::{Error, Gaussian1, RenyiOrder, Result};

/// Values below this are counted as genuinely negative.
pub const NEGATIVE_THRESHOLD: f64 = -1e-9;

/// Joint Gaussian of `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateParams {
    pub mu_x: f64,
    pub sigma_x: f64,
    pub mu_y: f64,
    pub sigma_y: f64,
    pub rho: f64,
}

impl BivariateParams {
    pub fn new(mu_x: f64, sigma_x: f64, mu_y: f64, sigma_y: f64, rho: f64) -> Result<Self> {
        let p = Self {
            mu_x,
            sigma_x,
            mu_y,
            sigma_y,
            rho,
        };
        p.validate()?;
        Ok(p)
    }

    /// Standard marginals with correlation `ρ`.
    pub fn standard(rho: f64) -> Result<Self> {
        Self::new(0.0, 1.0, 0.0, 1.0, rho)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu_x.is_finite() && self.mu_y.is_finite()) {
            return Err(Error::NonFinite("bivariate means"));
        }
        if !(self.sigma_x > 0.0
            && self.sigma_y > 0.0
            && self.sigma_x.is_finite()
            && self.sigma_y.is_finite())
        {
            return Err(Error::InvalidParameter(
                "standard deviations must be positive".into(),
            ));
        }
        if self.rho.is_nan() || self.rho.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "|ρ| must be < 1, got {}",
                self.rho
            )));
        }
        Ok(())
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        Self::new(self.mu_x, self.sigma_x, self.mu_y, self.sigma_y, rho)
    }

    /// `(1 − ρ²) σ_y²`.
    pub fn conditional_variance(&self) -> f64 {
        (1.0 - self.rho * self.rho) * self.sigma_y * self.sigma_y
    }

    /// `P_Y` as a prior, the point where the objective vanishes.
    pub fn marginal_prior(&self) -> PriorParams {
        PriorParams {
            mu_yq: self.mu_y,
            sigma_yq: self.sigma_y,
        }
    }
}

/// A Gaussian prior over `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorParams {
    pub mu_yq: f64,
    pub sigma_yq: f64,
}

impl PriorParams {
    pub fn new(mu_yq: f64, sigma_yq: f64) -> Result<Self> {
        if !mu_yq.is_finite() || !(sigma_yq.is_finite() && sigma_yq > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "prior needs a finite mean and positive std, got ({mu_yq}, {sigma_yq})"
            )));
        }
        Ok(Self { mu_yq, sigma_yq })
    }

    /// The prior with `σ_y²/σ_{y,q}² = var_ratio` and `μ_y − μ_{y,q} = mean_gap`.
    pub fn from_ratios(params: &BivariateParams, var_ratio: f64, mean_gap: f64) -> Result<Self> {
        if !(var_ratio.is_finite() && var_ratio > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "var_ratio must be positive, got {var_ratio}"
            )));
        }
        Self::new(params.mu_y - mean_gap, params.sigma_y / var_ratio.sqrt())
    }

    fn to_gaussian(self) -> Gaussian1 {
        Gaussian1::new(self.mu_yq, self.sigma_yq * self.sigma_yq).expect("validated prior")
    }
}

/// `W(y|x) = N(μ_y + (σ_y/σ_x)ρ(x − μ_x), (1−ρ²)σ_y²)`.
pub fn conditional(params: &BivariateParams, x: f64) -> Gaussian1 {
    let mean = params.mu_y + params.sigma_y / params.sigma_x * params.rho * (x - params.mu_x);
    Gaussian1::new(mean, params.conditional_variance()).expect("validated parameters")
}

/// Both combination variances `(1−α)σ_c² + ασ²` are positive, for `σ² = σ_y²`
/// and `σ² = σ_{y,q}²`.
pub fn feasibility(order: RenyiOrder, params: &BivariateParams, prior: &PriorParams) -> bool {
    let (y, q) = combination_variances(order.value(), params, prior);
    y > 0.0 && q > 0.0
}

fn combination_variances(a: f64, params: &BivariateParams, prior: &PriorParams) -> (f64, f64) {
    let sc2 = params.conditional_variance();
    (
        (1.0 - a) * sc2 + a * params.sigma_y.powi(2),
        (1.0 - a) * sc2 + a * prior.sigma_yq.powi(2),
    )
}

fn require_feasible(
    order: RenyiOrder,
    params: &BivariateParams,
    prior: &PriorParams,
) -> Result<()> {
    if feasibility(order, params, prior) {
        Ok(())
    } else {
        Err(Error::InfeasibleOrder {
            alpha: order.value(),
        })
    }
}

/// Closed form from the Gaussian moments `E_x[(μ_c(x) − μ)²] = (μ_y − μ)² + ρ²σ_y²`:
///
/// `Ī_α = (α/2)[((μ_y−μ_q)² + ρ²σ_y²)/σ_{α,q}² − ρ²σ_y²/σ_{α,y}²]
///      + (1/(2(1−α)))[log(σ_{α,q}²/σ_{α,y}²) + α log(σ_y²/σ_q²)]`.
pub fn ibar_closed(
    order: RenyiOrder,
    params: &BivariateParams,
    prior: &PriorParams,
) -> Result<f64> {
    require_feasible(order, params, prior)?;
    let a = order.value();
    let (say2, saq2) = combination_variances(a, params, prior);
    let sy2 = params.sigma_y.powi(2);
    let sq2 = prior.sigma_yq.powi(2);
    let spread = params.rho.powi(2) * sy2;
    let gap = params.mu_y - prior.mu_yq;
    let quadratic = 0.5 * a * ((gap * gap + spread) / saq2 - spread / say2);
    let log_part = ((saq2 / say2).ln() + a * (sy2 / sq2).ln()) / (2.0 * (1.0 - a));
    Ok(quadratic + log_part)
}

/// The printed final form, written in the ratios `r = σ_y²/σ_q²` and
/// `g² = (μ_y−μ_q)²/σ_q²`. Algebraically identical to [`ibar_closed`];
/// kept to confirm the printed expression.
pub fn ibar_printed(
    order: RenyiOrder,
    params: &BivariateParams,
    prior: &PriorParams,
) -> Result<f64> {
    require_feasible(order, params, prior)?;
    let a = order.value();
    let r = params.sigma_y.powi(2) / prior.sigma_yq.powi(2);
    let g2 = (params.mu_y - prior.mu_yq).powi(2) / prior.sigma_yq.powi(2);
    let rho2 = params.rho.powi(2);
    let k = (1.0 - a) * (1.0 - rho2);
    let first = 0.5 * a * ((g2 + rho2 * r) / (k * r + a) - rho2 / (k + a));
    let second = (((k + a / r) / (k + a)) * r.powf(a)).ln() / (2.0 * (1.0 - a));
    Ok(first + second)
}

/// Oracle value and the change between two rule sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    pub error: f64,
}

/// `E_x[D_α(W(·|x)‖Q_Y) − D_α(W(·|x)‖P_Y)]` by Gauss–Hermite quadrature
/// over `x ~ N(μ_x, σ_x²)`, the inner divergences in closed form. The rule
/// uses `nodes` points and the error is the change from `nodes/2`.
pub fn ibar_oracle(
    order: RenyiOrder,
    params: &BivariateParams,
    prior: &PriorParams,
    nodes: usize,
) -> Result<OracleValue> {
    require_feasible(order, params, prior)?;
    if nodes < 2 {
        return Err(Error::InvalidParameter(
            "at least two quadrature nodes are needed".into(),
        ));
    }
    let q = prior.to_gaussian();
    let p = params.marginal_prior().to_gaussian();
    let integrand = |x: f64| {
        let w = conditional(params, x);
        let dq = renyi_divergence_gaussian1(&w, &q, order).expect("feasibility checked");
        let dp = renyi_divergence_gaussian1(&w, &p, order).expect("feasibility checked");
        dq - dp
    };
    let fine = GaussHermite::new(nodes).expectation(params.mu_x, params.sigma_x, integrand);
    let coarse = GaussHermite::new(nodes / 2).expectation(params.mu_x, params.sigma_x, integrand);
    Ok(OracleValue {
        value: fine,
        error: (fine - coarse).abs(),
    })
}

/// The fully correlated limit, independent of `α`:
/// `½[(μ_y−μ_q)²/σ_q² + r − 1 − log r]` with `r = σ_y²/σ_q²`.
pub fn ibar_rho1(params: &BivariateParams, prior: &PriorParams) -> f64 {
    let r = params.sigma_y.powi(2) / prior.sigma_yq.powi(2);
    let gap = params.mu_y - prior.mu_yq;
    0.5 * (gap * gap / prior.sigma_yq.powi(2) + r - 1.0 - r.ln())
}

/// Axes of a landscape sweep around a baseline joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmGrid {
    pub alphas: Vec<f64>,
    pub rho_sq: Vec<f64>,
    pub var_ratios: Vec<f64>,
    pub mean_gaps: Vec<f64>,
    pub baseline: BivariateParams,
    /// Gauss–Hermite nodes for the oracle column.
    pub oracle_nodes: usize,
}

impl Default for GmGrid {
    /// Orders `{0.25, 0.5, 0.75, 1.5, 10}`, `ρ² ∈ {0, 0.25, 0.5, 0.75, 0.99}`,
    /// 16 log-spaced variance ratios in `[0.25, 4]`, 13 mean gaps in
    /// `[0, 3]`, standard marginals.
    fn default() -> Self {
        Self {
            alphas: vec![0.25, 0.5, 0.75, 1.5, 10.0],
            rho_sq: vec![0.0, 0.25, 0.5, 0.75, 0.99],
            var_ratios: log_space(0.25, 4.0, 16),
            mean_gaps: lin_space(0.0, 3.0, 13),
            baseline: BivariateParams::standard(0.0).expect("valid baseline"),
            oracle_nodes: 64,
        }
    }
}

pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    lin_space(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect()
}

impl GmGrid {
    pub fn validate(&self) -> Result<()> {
        let axes = [
            &self.alphas,
            &self.rho_sq,
            &self.var_ratios,
            &self.mean_gaps,
        ];
        if axes.iter().any(|a| a.is_empty()) {
            return Err(Error::InvalidParameter(
                "every grid axis needs at least one value".into(),
            ));
        }
        for &a in &self.alphas {
            RenyiOrder::new(a)?;
        }
        if let Some(r) = self.rho_sq.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return Err(Error::InvalidParameter(format!("ρ² = {r} outside [0, 1)")));
        }
        if let Some(v) = self
            .var_ratios
            .iter()
            .find(|v| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "var_ratio = {v} must be positive"
            )));
        }
        if self.mean_gaps.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidParameter("mean gaps must be finite".into()));
        }
        if self.oracle_nodes < 2 {
            return Err(Error::InvalidParameter(
                "oracle_nodes must be at least 2".into(),
            ));
        }
        self.baseline.validate()
    }

    pub fn len(&self) -> usize {
        self.alphas.len() * self.rho_sq.len() * self.var_ratios.len() * self.mean_gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One cell of a sweep. `value` and `oracle_value` are `None` when the
/// cell is infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmSweepPoint {
    pub alpha: f64,
    pub rho_sq: f64,
    pub var_ratio: f64,
    pub mean_gap: f64,
    pub feasible: bool,
    pub value: Option<f64>,
    pub oracle_value: Option<f64>,
}

impl GmSweepPoint {
    pub fn is_negative(&self) -> bool {
        self.value.is_some_and(|v| v < NEGATIVE_THRESHOLD)
    }

    pub fn abs_diff(&self) -> Option<f64> {
        Some((self.value? - self.oracle_value?).abs())
    }
}

/// Evaluates one grid cell.
pub fn sweep_point(
    grid: &GmGrid,
    alpha: f64,
    rho_sq: f64,
    var_ratio: f64,
    mean_gap: f64,
) -> Result<GmSweepPoint> {
    let order = RenyiOrder::new(alpha)?;
    let params = grid.baseline.with_rho(rho_sq.sqrt())?;
    let prior = PriorParams::from_ratios(&params, var_ratio, mean_gap)?;
    let feasible = feasibility(order, &params, &prior);
    let (value, oracle_value) = if feasible {
        (
            Some(ibar_closed(order, &params, &prior)?),
            Some(ibar_oracle(order, &params, &prior, grid.oracle_nodes)?.value),
        )
    } else {
        (None, None)
    };
    Ok(GmSweepPoint {
        alpha,
        rho_sq,
        var_ratio,
        mean_gap,
        feasible,
        value,
        oracle_value,
    })
}

/// All cells in grid order: α outermost, then ρ², variance ratio, mean gap.
pub fn sweep(grid: &GmGrid) -> Result<Vec<GmSweepPoint>> {
    grid.validate()?;
    let mut out = Vec::with_capacity(grid.len());
    for &a in &grid.alphas {
        for &r in &grid.rho_sq {
            for &v in &grid.var_ratios {
                for &g in &grid.mean_gaps {
                    out.push(sweep_point(grid, a, r, v, g)?);
                }
            }
        }
    }
    Ok(out)
}

/// Whether any prior in an `(α, ρ², mean_gap)` slice beats `P_Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceClass {
    pub alpha: f64,
    pub rho_sq: f64,
    pub mean_gap: f64,
    pub negative_cells: usize,
    pub departs: bool,
}

/// Groups sweep points by `(α, ρ², mean_gap)` in first-seen order.
pub fn classify_slices(points: &[GmSweepPoint]) -> Vec<SliceClass> {
    let mut out: Vec<SliceClass> = Vec::new();
    for p in points {
        let key = (p.alpha, p.rho_sq, p.mean_gap);
        let idx = match out
            .iter()
            .position(|s| (s.alpha, s.rho_sq, s.mean_gap) == key)
        {
            Some(i) => i,
            None => {
                out.push(SliceClass {
                    alpha: p.alpha,
                    rho_sq: p.rho_sq,
                    mean_gap: p.mean_gap,
                    negative_cells: 0,
                    departs: false,
                });
                out.len() - 1
            }
        };
        if p.is_negative() {
            out[idx].negative_cells += 1;
            out[idx].departs = true;
        }
    }
    out
}

/// Cell counts for one `(α, ρ²)` panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelSummary {
    pub alpha: f64,
    pub rho_sq: f64,
    pub negative: usize,
    pub feasible: usize,
    pub infeasible: usize,
}

/// Groups sweep points by `(α, ρ²)` in first-seen order.
pub fn summarize_panels(points: &[GmSweepPoint]) -> Vec<PanelSummary> {
    let mut out: Vec<PanelSummary> = Vec::new();
    for p in points {
        let idx = match out
            .iter()
            .position(|s| s.alpha == p.alpha && s.rho_sq == p.rho_sq)
        {
            Some(i) => i,
            None => {
                out.push(PanelSummary {
                    alpha: p.alpha,
                    rho_sq: p.rho_sq,
                    negative: 0,
                    feasible: 0,
                    infeasible: 0,
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        if p.feasible {
            s.feasible += 1;
        } else {
            s.infeasible += 1;
        }
        if p.is_negative() {
            s.negative += 1;
        }
    }
    out
}

/// Negative feasible cells at one order.
pub fn negative_count(points: &[GmSweepPoint], alpha: f64) -> usize {
    points
        .iter()
        .filter(|p| p.alpha == alpha && p.is_negative())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    #[test]
    fn conditional_values() {
        let p = BivariateParams::standard(0.5).unwrap();
        let c = conditional(&p, 2.0);
        assert!((c.mean() - 1.0).abs() < 1e-15 && (c.variance() - 0.75).abs() < 1e-15);
        let indep = BivariateParams::new(1.0, 2.0, -0.5, 1.5, 0.0).unwrap();
        for x in [-3.0, 0.0, 7.0] {
            let c = conditional(&indep, x);
            assert_eq!((c.mean(), c.variance()), (-0.5, 2.25));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(BivariateParams::standard(1.0).is_err());
        assert!(BivariateParams::new(0.0, 0.0, 0.0, 1.0, 0.1).is_err());
        assert!(PriorParams::new(0.0, -1.0).is_err());
    }

    #[test]
    fn feasibility_cases() {
        let p = BivariateParams::new(0.0, 1.0, 0.0, 0.99f64.sqrt(), 0.0).unwrap();
        let prior = PriorParams::new(0.0, 0.1).unwrap();
        assert!(feasibility(order(0.3), &p, &prior));
        assert!(!feasibility(order(10.0), &p, &prior));
        assert!(matches!(
            ibar_closed(order(10.0), &p, &prior),
            Err(Error::InfeasibleOrder { .. })
        ));
        let tight = BivariateParams::standard(1.0 - 1e-12).unwrap();
        for a in [0.5, 2.0, 50.0] {
            assert!(feasibility(order(a), &tight, &prior));
        }
    }

    #[test]
    fn zero_at_truth() {
        for rho in [0.0, 0.4, 0.95] {
            let p = BivariateParams::new(0.3, 1.2, -0.7, 0.8, rho).unwrap();
            for a in [0.25, 0.75, 3.0] {
                assert!(
                    ibar_closed(order(a), &p, &p.marginal_prior())
                        .unwrap()
                        .abs()
                        < 1e-14
                );
                assert!(
                    ibar_oracle(order(a), &p, &p.marginal_prior(), 64)
                        .unwrap()
                        .value
                        .abs()
                        < 1e-12
                );
            }
            assert_eq!(ibar_rho1(&p, &p.marginal_prior()), 0.0);
        }
    }

    #[test]
    fn independent_limit_is_marginal_divergence() {
        let p = BivariateParams::new(0.0, 1.0, 0.4, 1.3, 0.0).unwrap();
        let prior = PriorParams::new(-0.2, 0.9).unwrap();
        for a in [0.2, 0.5, 0.8, 1.5] {
            let d = renyi_divergence_gaussian1(
                &Gaussian1::new(0.4, 1.69).unwrap(),
                &prior.to_gaussian(),
                order(a),
            )
            .unwrap();
            assert!((ibar_closed(order(a), &p, &prior).unwrap() - d).abs() < 1e-14);
            assert!((ibar_oracle(order(a), &p, &prior, 64).unwrap().value - d).abs() < 1e-9);
            assert!(d >= 0.0);
        }
    }

    #[test]
    fn closed_printed_and_oracle_agree() {
        let p = BivariateParams::new(0.5, 1.4, -0.3, 0.9, 0.7).unwrap();
        for (m, s) in [(0.0, 0.5), (1.0, 1.2), (-2.0, 3.0)] {
            let prior = PriorParams::new(m, s).unwrap();
            for a in [0.1, 0.5, 0.9, 1.5] {
                let closed = ibar_closed(order(a), &p, &prior).unwrap();
                let printed = ibar_printed(order(a), &p, &prior).unwrap();
                let oracle = ibar_oracle(order(a), &p, &prior, 128).unwrap();
                assert!((closed - printed).abs() < 1e-12);
                assert!((closed - oracle.value).abs() < 1e-9);
                assert!(oracle.error < 1e-9);
            }
        }
    }

    #[test]
    fn half_variance_probe_is_positive_and_a_negative_point_exists() {
        // σ_y²/σ_q² = 0.5, no mean gap, ρ² = 0.9, α = 0.5.
        let p = BivariateParams::standard(0.9f64.sqrt()).unwrap();
        let prior = PriorParams::from_ratios(&p, 0.5, 0.0).unwrap();
        let v = ibar_oracle(order(0.5), &p, &prior, 128).unwrap().value;
        assert!((v - 0.105_248_379_839_88).abs() < 1e-12, "{v}");
        assert!((ibar_closed(order(0.5), &p, &prior).unwrap() - v).abs() < 1e-12);

        // A slightly narrower prior than P_Y at ρ² = 0.75 does beat it.
        let p = BivariateParams::standard(0.75f64.sqrt()).unwrap();
        let prior = PriorParams::from_ratios(&p, 4f64.powf(1.0 / 15.0), 0.0).unwrap();
        let v = ibar_oracle(order(0.5), &p, &prior, 128).unwrap().value;
        assert!(v < NEGATIVE_THRESHOLD);
        assert!((ibar_closed(order(0.5), &p, &prior).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn negative_region_does_not_grow_with_the_mean_gap() {
        let grid = GmGrid::default();
        let pts = sweep(&grid).unwrap();
        for &a in &grid.alphas {
            let counts: Vec<usize> = grid
                .mean_gaps
                .iter()
                .map(|&g| {
                    pts.iter()
                        .filter(|p| p.alpha == a && p.mean_gap == g && p.var_ratio < 1.0)
                        .filter(|p| p.is_negative())
                        .count()
                })
                .collect();
            assert!(
                counts.windows(2).all(|w| w[1] <= w[0]),
                "α = {a}: {counts:?}"
            );
        }
    }

    #[test]
    fn fully_correlated_limit() {
        let p = BivariateParams::standard((1.0 - 1e-8f64).sqrt()).unwrap();
        for (r, g) in [(0.5, 0.0), (2.0, 1.0), (0.3, 0.5)] {
            let prior = PriorParams::from_ratios(&p, r, g).unwrap();
            let limit = ibar_rho1(&p, &prior);
            for a in [0.25, 0.5, 0.75] {
                let v = ibar_closed(order(a), &p, &prior).unwrap();
                assert!((v - limit).abs() < 1e-4, "{a}: {v} vs {limit}");
            }
        }
        let prior = PriorParams::from_ratios(&p, 2.0, 0.0).unwrap();
        assert!((ibar_rho1(&p, &prior) - 0.5 * (2.0 - 1.0 - 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn default_grid_shape() {
        let g = GmGrid::default();
        assert_eq!(g.len(), 5 * 5 * 16 * 13);
        assert!((g.var_ratios[0] - 0.25).abs() < 1e-15 && (g.var_ratios[15] - 4.0).abs() < 1e-14);
        assert_eq!(g.mean_gaps[12], 3.0);
        assert!(g.validate().is_ok());
        let mut bad = g.clone();
        bad.alphas.clear();
        assert!(sweep(&bad).is_err());
        bad = g;
        bad.rho_sq = vec![1.0];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn default_sweep_properties() {
        let grid = GmGrid::default();
        let pts = sweep(&grid).unwrap();
        assert_eq!(pts.len(), grid.len());
        for p in &pts {
            if let Some(d) = p.abs_diff() {
                assert!(d <= 1e-7, "{p:?}");
            } else {
                assert!(!p.feasible && p.alpha > 1.0);
            }
        }
        assert!(pts
            .iter()
            .filter(|p| p.rho_sq == 0.0)
            .all(|p| !p.is_negative()));
        let panels = summarize_panels(&pts);
        assert_eq!(panels.len(), 25);
        assert!(panels.iter().all(|s| s.feasible + s.infeasible == 16 * 13));
        let slices = classify_slices(&pts);
        assert_eq!(slices.len(), 5 * 5 * 13);
        assert!(slices.iter().any(|s| s.departs));
    }
}
