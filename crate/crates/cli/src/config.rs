//! Run configuration: command-line flags merged over an optional JSON file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relbo_core::gm::{BivariateParams, GmGrid};
use relbo_core::RenyiOrder;
use serde::Deserialize;

/// Orders used by the P-PCA, bound and discrepancy commands.
pub const UNIT_ORDERS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub grid: GridOverride,
    /// Per-check tolerances, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub ppca: PpcaConfig,
    pub dichotomic: DichotomicConfig,
    pub relbo: RelboConfig,
    pub discrepancy: DiscrepancyConfig,
}

/// Landscape grid axes; absent axes keep their defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridOverride {
    pub alphas: Option<Vec<f64>>,
    pub rho_sq: Option<Vec<f64>>,
    pub var_ratios: Option<Vec<f64>>,
    pub mean_gaps: Option<Vec<f64>>,
    pub baseline: Option<BivariateParams>,
    pub oracle_nodes: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpcaConfig {
    /// Model JSON to load instead of generating and fitting one.
    pub model: Option<PathBuf>,
    pub n_x: usize,
    pub n_y: usize,
    /// Data points drawn for the fit.
    pub samples: usize,
    /// Observations at which the regularizer is evaluated.
    pub x_count: usize,
}

impl Default for PpcaConfig {
    fn default() -> Self {
        Self {
            model: None,
            n_x: 64,
            n_y: 8,
            samples: 2000,
            x_count: 5,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DichotomicConfig {
    /// `p(x, y)` indexed `[x][y]`; the rare-outcome construction if absent.
    pub joint: Option<[[f64; 2]; 2]>,
    pub s0: Vec<f64>,
    pub grid_size: usize,
}

impl Default for DichotomicConfig {
    fn default() -> Self {
        Self {
            joint: None,
            s0: vec![1e2, 1e4, 1e6],
            grid_size: 10_000,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelboConfig {
    pub model: Option<PathBuf>,
    pub n_x: usize,
    pub n_y: usize,
    pub x_count: usize,
    pub betas: Vec<f64>,
    /// Encoder perturbation scales; 0 is the optimal encoder itself.
    pub scales: Vec<f64>,
}

impl Default for RelboConfig {
    fn default() -> Self {
        Self {
            model: None,
            n_x: 8,
            n_y: 3,
            x_count: 3,
            betas: vec![0.25, 0.5, 1.0, 2.0],
            scales: vec![0.0, 0.1, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscrepancyConfig {
    pub n_x: usize,
    pub latent_dims: Vec<usize>,
    pub spectra_per_dim: usize,
}

impl Default for DiscrepancyConfig {
    fn default() -> Self {
        Self {
            n_x: 16,
            latent_dims: vec![1, 2, 3, 4],
            spectra_per_dim: 4,
        }
    }
}

#[derive(Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub alphas: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub file: ConfigFile,
}

impl RunConfig {
    pub fn load(
        path: Option<&Path>,
        seed: u64,
        out: PathBuf,
        alphas: Option<Vec<f64>>,
        tolerance: Option<f64>,
    ) -> Result<Self> {
        let file = match path {
            Some(p) => {
                let text =
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => ConfigFile::default(),
        };
        if let Some(t) = tolerance {
            if !(t.is_finite() && t >= 0.0) {
                bail!("tolerance must be finite and non-negative, got {t}");
            }
        }
        if let Some((name, t)) = file
            .tolerances
            .iter()
            .find(|(_, t)| !(t.is_finite() && **t >= 0.0))
        {
            bail!("tolerance for {name} must be finite and non-negative, got {t}");
        }
        if let Some(a) = &alphas {
            if a.is_empty() {
                bail!("--alpha needs at least one order");
            }
            for &v in a {
                RenyiOrder::new(v)?;
            }
        }
        fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Self {
            seed,
            out,
            alphas,
            tolerance,
            file,
        })
    }

    /// The tolerance for a named check: `--tolerance`, then the config
    /// file, then the default.
    pub fn tolerance_for(&self, check: &str, default: f64) -> f64 {
        self.tolerance
            .or_else(|| self.file.tolerances.get(check).copied())
            .unwrap_or(default)
    }

    /// Rejects tolerance keys that name no known check.
    pub fn check_tolerance_keys(&self, known: &[&str]) -> Result<()> {
        if let Some(k) = self
            .file
            .tolerances
            .keys()
            .find(|k| !known.contains(&k.as_str()))
        {
            bail!(
                "unknown check {k:?} in tolerances; known checks: {}",
                known.join(", ")
            );
        }
        Ok(())
    }

    /// Orders inside `(0, 1)`: `--alpha` or [`UNIT_ORDERS`].
    pub fn unit_orders(&self) -> Result<Vec<RenyiOrder>> {
        let values = self.alphas.clone().unwrap_or_else(|| UNIT_ORDERS.to_vec());
        values
            .into_iter()
            .map(|a| Ok(RenyiOrder::new(a)?.require_unit_interval()?))
            .collect()
    }

    /// The landscape grid with file overrides, then `--alpha`, applied.
    pub fn gm_grid(&self) -> Result<GmGrid> {
        let mut grid = GmGrid::default();
        let o = &self.file.grid;
        if let Some(v) = &o.alphas {
            grid.alphas = v.clone();
        }
        if let Some(v) = &o.rho_sq {
            grid.rho_sq = v.clone();
        }
        if let Some(v) = &o.var_ratios {
            grid.var_ratios = v.clone();
        }
        if let Some(v) = &o.mean_gaps {
            grid.mean_gaps = v.clone();
        }
        if let Some(b) = o.baseline {
            grid.baseline = b;
        }
        if let Some(n) = o.oracle_nodes {
            grid.oracle_nodes = n;
        }
        if let Some(a) = &self.alphas {
            grid.alphas = a.clone();
        }
        grid.validate()?;
        Ok(grid)
    }

    /// An independent random stream for one task, derived from the master seed.
    pub fn stream(&self, task: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(task);
        rng
    }
}
