use crate::{Error, RenyiOrder, Result};

/// Tolerance on `Σ p = 1` for a discrete distribution.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A probability vector over a finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist {
    probs: Vec<f64>,
}

impl DiscreteDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {bad} is not a non-negative finite number"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalise a non-negative weight vector.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::ZeroNormalizer);
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|p| *p > 0.0)
    }
}

impl std::ops::Index<usize> for DiscreteDist {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

fn same_support(p: &DiscreteDist, q: &DiscreteDist) -> Result<()> {
    if p.support_size() != q.support_size() {
        return Err(Error::DimensionMismatch {
            expected: p.support_size(),
            found: q.support_size(),
        });
    }
    Ok(())
}

/// `p^α q^{1−α}` with the continuous-extension conventions for zeros.
fn geometric_term(p: f64, q: f64, alpha: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if q == 0.0 {
        if alpha < 1.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        p.powf(alpha) * q.powf(1.0 - alpha)
    }
}

/// Shannon entropy `Σ p (−log p)`.
pub fn shannon_entropy_discrete(p: &DiscreteDist) -> f64 {
    p.probs
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .sum()
}

/// Rényi entropy `(1/(1−α)) log Σ p^α`.
pub fn renyi_entropy_discrete(p: &DiscreteDist, order: RenyiOrder) -> f64 {
    let a = order.value();
    let s: f64 = p
        .probs
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v.powf(a))
        .sum();
    s.ln() / (1.0 - a)
}

/// `Σ p log(p/q)`; infinite when `q = 0` somewhere on the support of `p`.
pub fn kl_divergence_discrete(p: &DiscreteDist, q: &DiscreteDist) -> Result<f64> {
    same_support(p, q)?;
    let mut total = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pi * (pi / qi).ln();
    }
    Ok(total)
}

/// `(1/(α−1)) log Σ p^α q^{1−α}`.
pub fn renyi_divergence_discrete(
    p: &DiscreteDist,
    q: &DiscreteDist,
    order: RenyiOrder,
) -> Result<f64> {
    same_support(p, q)?;
    let a = order.value();
    let absolutely_continuous = p
        .probs
        .iter()
        .zip(&q.probs)
        .all(|(&pi, &qi)| pi == 0.0 || qi > 0.0);
    if absolutely_continuous {
        // Σ p^α q^{1−α} − 1 = Σ p (exp((α−1) log(p/q)) − 1), accurate near α = 1.
        let excess: f64 = p
            .probs
            .iter()
            .zip(&q.probs)
            .filter(|(&pi, _)| pi > 0.0)
            .map(|(&pi, &qi)| pi * ((a - 1.0) * (pi / qi).ln()).exp_m1())
            .sum();
        return Ok(excess.ln_1p() / (a - 1.0));
    }
    let s: f64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(&pi, &qi)| geometric_term(pi, qi, a))
        .sum();
    if s.is_infinite() || s == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(s.ln() / (a - 1.0))
}

/// The normalised geometric mixture `p^α q^{1−α} / Σ p^α q^{1−α}`.
pub fn mixed_discrete(
    p: &DiscreteDist,
    q: &DiscreteDist,
    order: RenyiOrder,
) -> Result<DiscreteDist> {
    same_support(p, q)?;
    let a = order.value();
    let weights: Vec<f64> = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(&pi, &qi)| geometric_term(pi, qi, a))
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::ZeroNormalizer);
    }
    let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    // Renormalise once more so the sum is 1 to the last ulp.
    let s: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|v| *v /= s);
    DiscreteDist::new(probs)
}

/// `αD[R‖P] + (1−α)D[R‖Q] − D[R‖p_α] − (1−α)D_α[P‖Q]`, which vanishes
/// identically. Infinite divergences propagate as `+∞`.
pub fn identity_b1_residual(
    r: &DiscreteDist,
    p: &DiscreteDist,
    q: &DiscreteDist,
    order: RenyiOrder,
) -> Result<f64> {
    same_support(r, p)?;
    same_support(r, q)?;
    let a = order.value();
    let mixed = mixed_discrete(p, q, order)?;
    let terms = [
        kl_divergence_discrete(r, p)?,
        kl_divergence_discrete(r, q)?,
        kl_divergence_discrete(r, &mixed)?,
        renyi_divergence_discrete(p, q, order)?,
    ];
    if terms.iter().any(|t| t.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    Ok(a * terms[0] + (1.0 - a) * terms[1] - terms[2] - (1.0 - a) * terms[3])
}
