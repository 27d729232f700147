//! Seeded synthetic datasets: Block, Mixture, TwoAnom and the t-distribution
//! ensemble simulation.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::copula::normal::phi;
use crate::empirical::{rank_transform, ScoreMatrix};
use crate::error::{Error, Result};

/// A score matrix with its reference column clustering and, when known,
/// which rows are outliers.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub scores: ScoreMatrix,
    /// Reference cluster of each column; `None` marks a noise column.
    pub detector_cluster_labels: Vec<Option<usize>>,
    pub outlier_labels: Option<Vec<bool>>,
}

impl DatasetBundle {
    fn new(
        scores: ScoreMatrix,
        detector_cluster_labels: Vec<Option<usize>>,
        outlier_labels: Option<Vec<bool>>,
    ) -> Self {
        debug_assert_eq!(detector_cluster_labels.len(), scores.n_cols());
        if let Some(o) = &outlier_labels {
            debug_assert_eq!(o.len(), scores.n_rows());
        }
        Self {
            scores,
            detector_cluster_labels,
            outlier_labels,
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// One draw of `dim` standard normals with pairwise correlation `rho >= 0`.
fn equicorrelated(rng: &mut impl Rng, dim: usize, rho: f64) -> Vec<f64> {
    let shared = normal(rng) * rho.sqrt();
    let own = (1.0 - rho).sqrt();
    (0..dim).map(|_| shared + own * normal(rng)).collect()
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|j| format!("{prefix}{j}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlockConfig {
    pub n: usize,
    /// Corner of the two blocks.
    pub b: f64,
    pub n_clusters: usize,
    pub k_per_cluster: usize,
    /// Gaussian-copula correlation inside the upper block, same cluster.
    pub rho: f64,
    /// Fraction of rows placed in the upper block.
    pub upper_weight: f64,
}

impl Default for BlockConfig {
    fn default() -> Self {
        Self {
            n: 5000,
            b: 0.85,
            n_clusters: 2,
            k_per_cluster: 4,
            rho: 0.9,
            upper_weight: 0.15,
        }
    }
}

/// Block dataset. Each row lies either entirely in the lower block
/// `[0,b]^k` (independent uniforms) or entirely in the upper block `[b,1]^k`,
/// where columns of one cluster share a Gaussian copula and clusters are
/// independent of each other.
pub fn gen_block(cfg: &BlockConfig, seed: u64) -> Result<DatasetBundle> {
    if !(cfg.b > 0.0 && cfg.b < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "block corner b = {} not in (0,1)",
            cfg.b
        )));
    }
    if !(0.0..=1.0).contains(&cfg.upper_weight) || !(0.0..1.0).contains(&cfg.rho) {
        return Err(Error::InvalidParameter(format!(
            "upper_weight = {} and rho = {} must lie in [0,1] and [0,1)",
            cfg.upper_weight, cfg.rho
        )));
    }
    if cfg.n < 2 || cfg.n_clusters * cfg.k_per_cluster < 2 {
        return Err(Error::InvalidParameter("block dataset too small".into()));
    }
    let k = cfg.n_clusters * cfg.k_per_cluster;
    let mut rng = rng(seed);
    let mut cols = vec![Vec::with_capacity(cfg.n); k];
    for _ in 0..cfg.n {
        if rng.random::<f64>() < cfg.upper_weight {
            for c in 0..cfg.n_clusters {
                let z = equicorrelated(&mut rng, cfg.k_per_cluster, cfg.rho);
                for (m, zm) in z.into_iter().enumerate() {
                    cols[c * cfg.k_per_cluster + m].push(cfg.b + (1.0 - cfg.b) * phi(zm));
                }
            }
        } else {
            for col in cols.iter_mut() {
                col.push(cfg.b * rng.random::<f64>());
            }
        }
    }
    let labels = (0..k).map(|j| Some(j / cfg.k_per_cluster)).collect();
    Ok(DatasetBundle::new(
        ScoreMatrix::from_columns(names("s", k), cols)?,
        labels,
        None,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixtureConfig {
    pub n_in: usize,
    pub n_anom: usize,
    pub dim: usize,
    pub dim_spiked: usize,
    pub rho_in: f64,
    pub rho_anom: f64,
    pub scale: f64,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        Self {
            n_in: 5000,
            n_anom: 200,
            dim: 8,
            dim_spiked: 4,
            rho_in: 0.6,
            rho_anom: 0.8,
            scale: 10.0,
        }
    }
}

/// Gaussian mixture with spiked anomalies, absolute values, then rank
/// transformed. Rows `n_in..` are the anomalies; the first `dim_spiked`
/// columns form cluster 0.
pub fn gen_mixture(cfg: &MixtureConfig, seed: u64) -> Result<DatasetBundle> {
    if cfg.dim_spiked == 0 || cfg.dim_spiked >= cfg.dim {
        return Err(Error::InvalidParameter(format!(
            "dim_spiked = {} must be in 1..{}",
            cfg.dim_spiked, cfg.dim
        )));
    }
    let mut rng = rng(seed);
    let mut cols = vec![Vec::with_capacity(cfg.n_in + cfg.n_anom); cfg.dim];
    for r in 0..cfg.n_in + cfg.n_anom {
        let anom = r >= cfg.n_in;
        let x = equicorrelated(
            &mut rng,
            cfg.dim,
            if anom { cfg.rho_anom } else { cfg.rho_in },
        );
        for (j, v) in x.into_iter().enumerate() {
            let v = if anom && j < cfg.dim_spiked {
                v * cfg.scale
            } else {
                v
            };
            cols[j].push(v.abs());
        }
    }
    let raw = ScoreMatrix::from_columns(names("s", cfg.dim), cols)?;
    let u = rank_transform(&raw);
    let labels = (0..cfg.dim)
        .map(|j| Some(if j < cfg.dim_spiked { 0 } else { 1 }))
        .collect();
    let outliers = (0..cfg.n_in + cfg.n_anom).map(|r| r >= cfg.n_in).collect();
    Ok(DatasetBundle::new(
        ScoreMatrix::from_columns(u.names().to_vec(), u.columns().to_vec())?,
        labels,
        Some(outliers),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoAnomConfig {
    pub n_in: usize,
    pub n_anom_each: usize,
    pub dim: usize,
    pub dim_true: usize,
    pub dim_spiked: usize,
    /// Standard deviation off the true subspace, relative to 1 on it.
    pub noise_sd: f64,
    pub noise_factor: f64,
    pub spike_factor: f64,
    pub top_components: Vec<usize>,
    pub bottom_components: Vec<usize>,
}

impl Default for TwoAnomConfig {
    fn default() -> Self {
        Self {
            n_in: 5000,
            n_anom_each: 100,
            dim: 100,
            dim_true: 30,
            dim_spiked: 5,
            noise_sd: 0.01,
            noise_factor: 30.0,
            spike_factor: 3.0,
            top_components: vec![3, 5, 8, 10],
            bottom_components: vec![3, 5, 8, 10],
        }
    }
}

/// Two anomaly types in a 100-dimensional latent space, scored by PCA
/// projection-norm detectors. Rows: inliers, then type-1 (noise on the
/// complement), then type-2 (spiked on the true subspace). Columns: the
/// top-component detectors (cluster 0), then the bottom-component ones.
pub fn gen_two_anom(cfg: &TwoAnomConfig, seed: u64) -> Result<DatasetBundle> {
    let max_m = cfg
        .top_components
        .iter()
        .chain(&cfg.bottom_components)
        .copied()
        .max()
        .unwrap_or(0);
    if cfg.dim_spiked > cfg.dim_true || cfg.dim_true >= cfg.dim || max_m == 0 || max_m > cfg.dim {
        return Err(Error::InvalidParameter(
            "inconsistent two_anom dimensions".into(),
        ));
    }
    let n = cfg.n_in + 2 * cfg.n_anom_each;
    let mut rng = rng(seed);
    let mut x = DMatrix::zeros(n, cfg.dim);
    for r in 0..n {
        let kind = if r < cfg.n_in {
            0
        } else if r < cfg.n_in + cfg.n_anom_each {
            1
        } else {
            2
        };
        for c in 0..cfg.dim {
            let sd = if c < cfg.dim_true {
                if kind == 2 && c < cfg.dim_spiked {
                    cfg.spike_factor
                } else {
                    1.0
                }
            } else if kind == 1 {
                cfg.noise_sd * cfg.noise_factor
            } else {
                cfg.noise_sd
            };
            x[(r, c)] = sd * normal(&mut rng);
        }
    }
    let mean = x.row_mean();
    for mut row in x.row_iter_mut() {
        row -= &mean;
    }
    let cov = x.transpose() * &x / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..cfg.dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    // projections onto every component, descending variance
    let basis = DMatrix::from_fn(cfg.dim, cfg.dim, |i, c| eig.eigenvectors[(i, order[c])]);
    let proj = &x * basis;

    let score = |comps: &[usize]| -> Vec<f64> {
        (0..n)
            .map(|r| {
                comps
                    .iter()
                    .map(|&c| proj[(r, c)].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    };
    let mut cols = Vec::new();
    let mut col_names = Vec::new();
    let mut labels = Vec::new();
    for &m in &cfg.top_components {
        cols.push(score(&(0..m).collect::<Vec<_>>()));
        col_names.push(format!("pc_top{m}"));
        labels.push(Some(0));
    }
    for &m in &cfg.bottom_components {
        cols.push(score(&((cfg.dim - m)..cfg.dim).collect::<Vec<_>>()));
        col_names.push(format!("pc_bottom{m}"));
        labels.push(Some(1));
    }
    let outliers = (0..n).map(|r| r >= cfg.n_in).collect();
    Ok(DatasetBundle::new(
        ScoreMatrix::from_columns(col_names, cols)?,
        labels,
        Some(outliers),
    ))
}

/// Type of each TwoAnom row: 0 inlier, 1 off-subspace noise, 2 spiked.
pub fn two_anom_row_kinds(cfg: &TwoAnomConfig) -> Vec<u8> {
    let mut v = vec![0u8; cfg.n_in];
    v.extend(std::iter::repeat_n(1u8, cfg.n_anom_each));
    v.extend(std::iter::repeat_n(2u8, cfg.n_anom_each));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TEnsembleConfig {
    pub n: usize,
    pub nu: f64,
    pub n_clusters: usize,
    pub k_per_cluster: usize,
    pub n_noise: usize,
    pub outlier_fraction: f64,
}

impl Default for TEnsembleConfig {
    fn default() -> Self {
        Self {
            n: 5000,
            nu: 2.1,
            n_clusters: 4,
            k_per_cluster: 3,
            n_noise: 50,
            outlier_fraction: 0.03,
        }
    }
}

/// Clustered multivariate-t columns sharing a chi-square mixing variable per
/// cluster, plus normal noise columns. Detectors are `|X_ij|`; outliers are
/// the top `ceil(fraction * n)` rows by norm over the t columns.
pub fn gen_t_ensemble(cfg: &TEnsembleConfig, seed: u64) -> Result<DatasetBundle> {
    let chi = ChiSquared::new(cfg.nu)
        .map_err(|e| Error::InvalidParameter(format!("degrees of freedom {}: {e}", cfg.nu)))?;
    let k_t = cfg.n_clusters * cfg.k_per_cluster;
    let k = k_t + cfg.n_noise;
    if cfg.n < 2 || k < 2 || !(cfg.outlier_fraction > 0.0 && cfg.outlier_fraction < 1.0) {
        return Err(Error::InvalidParameter(
            "t ensemble too small or bad fraction".into(),
        ));
    }
    let mut rng = rng(seed);
    let mut x = vec![Vec::with_capacity(cfg.n); k];
    for _ in 0..cfg.n {
        for c in 0..cfg.n_clusters {
            let v: f64 = chi.sample(&mut rng);
            let s = (cfg.nu / v).sqrt();
            for m in 0..cfg.k_per_cluster {
                x[c * cfg.k_per_cluster + m].push(normal(&mut rng) * s);
            }
        }
        for col in x.iter_mut().skip(k_t) {
            col.push(normal(&mut rng));
        }
    }
    let norms: Vec<f64> = (0..cfg.n)
        .map(|r| x[..k_t].iter().map(|c| c[r] * c[r]).sum::<f64>())
        .collect();
    let n_out = (cfg.outlier_fraction * cfg.n as f64).ceil() as usize;
    let mut order: Vec<usize> = (0..cfg.n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut outliers = vec![false; cfg.n];
    for &r in &order[..n_out] {
        outliers[r] = true;
    }
    let cols = x
        .into_iter()
        .map(|c| c.into_iter().map(f64::abs).collect())
        .collect();
    let mut col_names = names("t", k_t);
    col_names.extend(names("noise", cfg.n_noise));
    let labels = (0..k)
        .map(|j| (j < k_t).then_some(j / cfg.k_per_cluster))
        .collect();
    Ok(DatasetBundle::new(
        ScoreMatrix::from_columns(col_names, cols)?,
        labels,
        Some(outliers),
    ))
}

/// Named generators with default settings, as selected from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Block,
    Mixture,
    TwoAnom,
    TEnsemble,
}

impl Generator {
    pub const ALL: [Generator; 4] = [
        Generator::Block,
        Generator::Mixture,
        Generator::TwoAnom,
        Generator::TEnsemble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Block => "block",
            Generator::Mixture => "mixture",
            Generator::TwoAnom => "two_anom",
            Generator::TEnsemble => "t_ensemble",
        }
    }

    pub fn generate(self, seed: u64) -> Result<DatasetBundle> {
        match self {
            Generator::Block => gen_block(&BlockConfig::default(), seed),
            Generator::Mixture => gen_mixture(&MixtureConfig::default(), seed),
            Generator::TwoAnom => gen_two_anom(&TwoAnomConfig::default(), seed),
            Generator::TEnsemble => gen_t_ensemble(&TEnsembleConfig::default(), seed),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown generator '{s}'")))
    }
}
