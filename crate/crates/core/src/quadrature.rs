//! Numerical integration used by the oracles: adaptive Gauss–Kronrod on a
//! finite interval and Gauss–Hermite rules for Gaussian expectations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Result of a numerical integration together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Estimate {
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    }
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive 7/15-point Gauss–Kronrod integration of `f` over
/// `[a, b]`, bisecting the worst segment until the summed error estimate is
/// below `abs_tol + rel_tol·|I|` or `max_segments` is reached.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Estimate {
    // Start from a uniform partition so narrow peaks are not missed.
    let initial = 16;
    let width = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(max_segments + initial);
    for k in 0..initial {
        let lo = a + width * k as f64;
        let hi = if k + 1 == initial { b } else { lo + width };
        heap.push(Segment {
            a: lo,
            b: hi,
            est: gk15(&f, lo, hi),
        });
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.est.value, e + s.est.error));
        if error <= abs_tol.max(rel_tol * value.abs()) || heap.len() >= max_segments {
            return Estimate { value, error };
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment cannot be split further in floating point.
            heap.push(worst);
            return Estimate { value, error };
        }
        heap.push(Segment {
            a: worst.a,
            b: mid,
            est: gk15(&f, worst.a, mid),
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            est: gk15(&f, mid, worst.b),
        });
    }
}

/// Gauss–Hermite rule for the weight `exp(-t²)` on the real line.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes by Newton iteration on the orthonormal Hermite recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss–Hermite rule needs at least one node");
        const PI_M4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..200 {
                let mut p1 = PI_M4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `E[f(X)]` for `X ~ N(mean, std²)`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, mean: f64, std: f64, f: F) -> f64 {
        let scale = std::f64::consts::SQRT_2 * std;
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(mean + scale * t))
            .sum();
        sum / std::f64::consts::PI.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_gaussian_density() {
        let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let est = integrate_adaptive(f, -12.0, 12.0, 1e-15, 1e-14, 2000);
        assert!((est.value - 1.0).abs() < 1e-13, "{est:?}");
        assert!(est.error < 1e-13);
    }

    #[test]
    fn kronrod_polynomial_exact() {
        let est = integrate_adaptive(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-14, 1e-14, 100);
        assert!((est.value - (64.0 / 6.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn hermite_weights_sum_to_sqrt_pi() {
        for n in [1, 2, 5, 20, 64, 128] {
            let gh = GaussHermite::new(n);
            let s: f64 = gh.weights.iter().sum();
            assert!(
                (s - std::f64::consts::PI.sqrt()).abs() < 1e-12,
                "n={n} sum={s}"
            );
        }
    }

    #[test]
    fn hermite_gaussian_moments() {
        let gh = GaussHermite::new(64);
        let (m, s) = (0.7, 1.9);
        assert!((gh.expectation(m, s, |x| x) - m).abs() < 1e-12);
        assert!((gh.expectation(m, s, |x| x * x) - (m * m + s * s)).abs() < 1e-11);
        let fourth = gh.expectation(0.0, 1.0, |x| x.powi(4));
        assert!((fourth - 3.0).abs() < 1e-11);
        let gh = GaussHermite::new(128);
        assert!((gh.expectation(0.0, 1.0, |x| (x).cos()) - (-0.5f64).exp()).abs() < 1e-13);
    }
}
