//! Cluster-aware combination of pseudo-score columns and AUC-ROC evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::empirical::PseudoMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Within {
    /// Ignore clusters; the across operator runs over every column.
    All,
    Mean,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Across {
    Mean,
    Max,
}

impl Within {
    pub const ALL: [Within; 3] = [Within::All, Within::Mean, Within::Max];

    pub fn name(self) -> &'static str {
        match self {
            Within::All => "all",
            Within::Mean => "mean",
            Within::Max => "max",
        }
    }
}

impl Across {
    pub const ALL: [Across; 2] = [Across::Mean, Across::Max];

    pub fn name(self) -> &'static str {
        match self {
            Across::Mean => "mean",
            Across::Max => "max",
        }
    }

    fn apply(self, xs: impl Iterator<Item = f64>) -> f64 {
        match self {
            Across::Mean => {
                let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
                s / c as f64
            }
            Across::Max => xs.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl fmt::Display for Within {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Across {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Within {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Within::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown within-cluster operator '{s}'")))
    }
}

impl FromStr for Across {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Across::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown across-cluster operator '{s}'")))
    }
}

/// How to combine columns. `cluster_labels[j]` is the cluster of column `j`,
/// `None` for noise.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub within: Within,
    pub across: Across,
    pub cluster_labels: Vec<Option<usize>>,
}

impl EnsembleSpec {
    pub fn new(within: Within, across: Across, cluster_labels: Vec<Option<usize>>) -> Self {
        Self {
            within,
            across,
            cluster_labels,
        }
    }

    /// Non-empty clusters as column index lists, in ascending cluster id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let max = self.cluster_labels.iter().flatten().max();
        let Some(&max) = max else {
            return Vec::new();
        };
        let mut out = vec![Vec::new(); max + 1];
        for (j, l) in self.cluster_labels.iter().enumerate() {
            if let Some(c) = l {
                out[*c].push(j);
            }
        }
        out.retain(|c| !c.is_empty());
        out
    }
}

/// One combined score per row.
pub fn combine_scores(u: &PseudoMatrix, spec: &EnsembleSpec) -> Result<Vec<f64>> {
    let n = u.n_rows();
    let cols = u.columns();
    if spec.within == Within::All {
        return Ok((0..n)
            .map(|r| spec.across.apply(cols.iter().map(|c| c[r])))
            .collect());
    }
    if spec.cluster_labels.len() != u.n_cols() {
        return Err(Error::InvalidInput(format!(
            "{} cluster labels for {} columns",
            spec.cluster_labels.len(),
            u.n_cols()
        )));
    }
    let clusters = spec.clusters();
    if clusters.is_empty() {
        return Err(Error::DegenerateClustering(
            "every column is labeled noise".into(),
        ));
    }
    let within = |r: usize, members: &[usize]| -> f64 {
        let xs = members.iter().map(|&j| cols[j][r]);
        match spec.within {
            Within::Max => Across::Max.apply(xs),
            _ => Across::Mean.apply(xs),
        }
    };
    Ok((0..n)
        .map(|r| spec.across.apply(clusters.iter().map(|m| within(r, m))))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocResult {
    pub auc: f64,
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`; tied scores form one step.
    pub curve: Vec<(f64, f64)>,
}

/// AUC as the Mann-Whitney statistic with ties counted half, plus the ROC curve.
pub fn auc_roc(scores: &[f64], labels: &[bool]) -> Result<RocResult> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite score at row {i}")));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidInput(
            "AUC needs at least one positive and one negative label".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    // Walk tie groups from the highest score down. Each group contributes
    // pos * (negatives strictly below) + pos * neg_in_group / 2.
    let mut curve = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut u_stat = 0.0;
    let mut start = 0;
    while start < order.len() {
        let s = scores[order[start]];
        let mut end = start;
        let (mut gp, mut gn) = (0usize, 0usize);
        while end < order.len() && scores[order[end]] == s {
            if labels[order[end]] {
                gp += 1;
            } else {
                gn += 1;
            }
            end += 1;
        }
        let neg_below = n_neg - fp - gn;
        u_stat += gp as f64 * (neg_below as f64 + 0.5 * gn as f64);
        tp += gp;
        fp += gn;
        curve.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        start = end;
    }
    Ok(RocResult {
        auc: u_stat / (n_pos as f64 * n_neg as f64),
        curve,
    })
}

/// Trapezoidal area under a ROC curve.
pub fn trapezoid_area(curve: &[(f64, f64)]) -> f64 {
    curve
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * 0.5 * (w[0].1 + w[1].1))
        .sum()
}
