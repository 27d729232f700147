use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Default neighborhood size; the smallest detector cluster of interest has three members.
pub const DEFAULT_MIN_PTS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DbscanResult {
    /// Cluster id per detector, `None` for noise. Ids are numbered in order
    /// of first appearance.
    pub labels: Vec<Option<usize>>,
    pub eps: f64,
    pub min_pts: usize,
}

impl DbscanResult {
    pub fn n_clusters(&self) -> usize {
        self.labels.iter().flatten().max().map_or(0, |m| m + 1)
    }

    pub fn n_noise(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    /// Member indices of each cluster.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters()];
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(c) = l {
                out[*c].push(i);
            }
        }
        out
    }
}

/// Elementwise `exp(-w)`.
pub fn dissimilarity(w: &DMatrix<f64>) -> DMatrix<f64> {
    w.map(|v| (-v).exp())
}

/// Distance from each point to its `min_pts`-th nearest point, counting
/// the point itself as the first.
pub fn k_distances(d: &DMatrix<f64>, min_pts: usize) -> Vec<f64> {
    let k = d.nrows();
    let rank = min_pts.max(2) - 1;
    (0..k)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).filter(|&j| j != i).map(|j| d[(i, j)]).collect();
            row.sort_by(f64::total_cmp);
            row[(rank - 1).min(row.len() - 1)]
        })
        .collect()
}

/// `eps` at the midpoint of the largest gap in the sorted k-distances, or
/// the largest k-distance when they are all equal.
pub fn auto_eps(d: &DMatrix<f64>, min_pts: usize) -> f64 {
    let mut kd = k_distances(d, min_pts);
    kd.sort_by(f64::total_cmp);
    let mut best = (0.0, kd[kd.len() - 1]);
    for w in kd.windows(2) {
        let gap = w[1] - w[0];
        if gap > best.0 {
            best = (gap, 0.5 * (w[0] + w[1]));
        }
    }
    best.1
}

/// DBSCAN on a precomputed dissimilarity matrix. Every point is its own
/// neighbor regardless of the diagonal.
pub fn dbscan_precomputed(d: &DMatrix<f64>, eps: f64, min_pts: usize) -> Result<DbscanResult> {
    if eps.is_nan() || eps <= 0.0 || min_pts == 0 {
        return Err(Error::InvalidParameter(format!(
            "dbscan needs eps > 0 and min_pts >= 1, got eps = {eps}, min_pts = {min_pts}"
        )));
    }
    let k = d.nrows();
    let neighbors =
        |i: usize| -> Vec<usize> { (0..k).filter(|&j| j == i || d[(i, j)] <= eps).collect() };
    let mut labels: Vec<Option<usize>> = vec![None; k];
    let mut visited = vec![false; k];
    let mut next = 0;
    for p in 0..k {
        if visited[p] {
            continue;
        }
        visited[p] = true;
        let seeds = neighbors(p);
        if seeds.len() < min_pts {
            continue;
        }
        let c = next;
        next += 1;
        labels[p] = Some(c);
        let mut queue: VecDeque<usize> = seeds.into_iter().filter(|&j| j != p).collect();
        while let Some(x) = queue.pop_front() {
            if labels[x].is_none() {
                labels[x] = Some(c);
            }
            if visited[x] {
                continue;
            }
            visited[x] = true;
            let nx = neighbors(x);
            if nx.len() >= min_pts {
                queue.extend(
                    nx.into_iter()
                        .filter(|&j| !visited[j] || labels[j].is_none()),
                );
            }
        }
    }
    Ok(DbscanResult {
        labels,
        eps,
        min_pts,
    })
}

/// DBSCAN on `exp(-W)`. `eps` defaults to [`auto_eps`].
pub fn dbscan_cluster(
    w: &SimilarityMatrix,
    eps: Option<f64>,
    min_pts: usize,
) -> Result<DbscanResult> {
    let d = dissimilarity(&w.values);
    let eps = eps.unwrap_or_else(|| auto_eps(&d, min_pts));
    dbscan_precomputed(&d, eps, min_pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks() -> DMatrix<f64> {
        // similarity 3 within blocks of 3, 0.1 across
        DMatrix::from_fn(6, 6, |i, j| {
            if i == j {
                50.0
            } else if (i < 3) == (j < 3) {
                3.0
            } else {
                0.1
            }
        })
    }

    #[test]
    fn separable_blocks() {
        let d = dissimilarity(&blocks());
        let eps = 0.5 * ((-3.0f64).exp() + (-0.1f64).exp());
        let r = dbscan_precomputed(&d, eps, 3).unwrap();
        assert_eq!(r.n_clusters(), 2);
        assert_eq!(r.n_noise(), 0);
        assert_eq!(
            r.labels,
            vec![Some(0), Some(0), Some(0), Some(1), Some(1), Some(1)]
        );
        assert_eq!(auto_eps(&d, 3), (-3.0f64).exp());
        assert_eq!(
            dbscan_precomputed(&d, auto_eps(&d, 3), 3).unwrap().labels,
            r.labels
        );
    }

    #[test]
    fn auto_eps_splits_at_gap() {
        // blocks plus one far point: k-distances {e^-3 x6, e^-0.1}
        let w = DMatrix::from_fn(7, 7, |i, j| {
            if i == j {
                50.0
            } else if i == 6 || j == 6 {
                0.1
            } else if (i < 3) == (j < 3) {
                3.0
            } else {
                0.5
            }
        });
        let d = dissimilarity(&w);
        let eps = auto_eps(&d, 3);
        assert!((eps - 0.5 * ((-3.0f64).exp() + (-0.1f64).exp())).abs() < 1e-15);
        let r = dbscan_precomputed(&d, eps, 3).unwrap();
        assert_eq!(r.n_clusters(), 2);
        assert_eq!(r.labels[6], None);
    }

    #[test]
    fn small_eps_is_all_noise() {
        let d = dissimilarity(&blocks());
        let r = dbscan_precomputed(&d, 1e-3, 2).unwrap();
        assert_eq!(r.n_noise(), 6);
        assert_eq!(r.n_clusters(), 0);
    }

    #[test]
    fn border_points_join_clusters() {
        // 0-1-2 chain; only 1 is core with min_pts = 3
        let d = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0]);
        let r = dbscan_precomputed(&d, 1.0, 3).unwrap();
        assert_eq!(r.labels, vec![Some(0), Some(0), Some(0)]);
    }

    #[test]
    fn rejects_bad_params() {
        let d = dissimilarity(&blocks());
        assert!(dbscan_precomputed(&d, 0.0, 3).is_err());
        assert!(dbscan_precomputed(&d, 0.5, 0).is_err());
    }
}
