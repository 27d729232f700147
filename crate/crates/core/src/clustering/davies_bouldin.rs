use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::spectral::SpectralEmbedding;
use crate::error::{Error, Result};

/// How a cluster's spread `s_i` is computed from its members.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spread {
    /// `(1/n_i) * sqrt(sum ||v - a_i||^2)`, the count outside the root.
    #[default]
    RootSumOverCount,
    /// Mean Euclidean distance to the centroid (the common textbook form).
    MeanDistance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterEvaluation {
    pub db_index: f64,
    /// Distinct cluster ids, ascending; indexes the vectors below.
    pub cluster_ids: Vec<usize>,
    pub per_cluster_spread: Vec<f64>,
    /// `m_ij`, distances between cluster centroids.
    pub centroid_distances: DMatrix<f64>,
    pub labels: Vec<usize>,
}

/// Davies-Bouldin index of `points` (rows) under reference `labels`.
///
/// `DB = (1/n_c) sum_i max_{j != i} (s_i + s_j) / m_ij`; lower is better.
pub fn davies_bouldin_points(
    points: &DMatrix<f64>,
    labels: &[usize],
    spread: Spread,
) -> Result<ClusterEvaluation> {
    if labels.len() != points.nrows() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} points",
            labels.len(),
            points.nrows()
        )));
    }
    let mut cluster_ids: Vec<usize> = labels.to_vec();
    cluster_ids.sort_unstable();
    cluster_ids.dedup();
    let n_c = cluster_ids.len();
    if n_c < 2 {
        return Err(Error::DegenerateClustering(format!(
            "need at least 2 clusters, got {n_c}"
        )));
    }

    let dim = points.ncols();
    let members: Vec<Vec<usize>> = cluster_ids
        .iter()
        .map(|&c| (0..labels.len()).filter(|&r| labels[r] == c).collect())
        .collect();
    let centroids: Vec<DVector<f64>> = members
        .iter()
        .map(|rows| {
            let mut a = DVector::zeros(dim);
            for &r in rows {
                a += points.row(r).transpose();
            }
            a / rows.len() as f64
        })
        .collect();
    let spreads: Vec<f64> = members
        .iter()
        .zip(&centroids)
        .map(|(rows, a)| {
            let n_i = rows.len() as f64;
            let d2 = rows
                .iter()
                .map(|&r| (points.row(r).transpose() - a).norm_squared());
            match spread {
                Spread::RootSumOverCount => d2.sum::<f64>().sqrt() / n_i,
                Spread::MeanDistance => d2.map(f64::sqrt).sum::<f64>() / n_i,
            }
        })
        .collect();

    let mut m = DMatrix::zeros(n_c, n_c);
    for i in 0..n_c {
        for j in (i + 1)..n_c {
            let d = (&centroids[i] - &centroids[j]).norm();
            if d == 0.0 {
                return Err(Error::DegenerateClustering(format!(
                    "clusters {} and {} share a centroid",
                    cluster_ids[i], cluster_ids[j]
                )));
            }
            m[(i, j)] = d;
            m[(j, i)] = d;
        }
    }
    let total: f64 = (0..n_c)
        .map(|i| {
            (0..n_c)
                .filter(|&j| j != i)
                .map(|j| (spreads[i] + spreads[j]) / m[(i, j)])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(ClusterEvaluation {
        db_index: total / n_c as f64,
        cluster_ids,
        per_cluster_spread: spreads,
        centroid_distances: m,
        labels: labels.to_vec(),
    })
}

/// Davies-Bouldin index of a spectral embedding under reference labels.
pub fn davies_bouldin(e: &SpectralEmbedding, labels: &[usize]) -> Result<ClusterEvaluation> {
    davies_bouldin_points(&e.coordinates, labels, Spread::default())
}
