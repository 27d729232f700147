//! Pairwise similarity matrices over all columns of a score matrix.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copula::{THETA_MAX, THETA_MIN};
use crate::empirical::{rank_transform, PseudoMatrix, QuadrantLevel, ScoreMatrix};
use crate::error::{Error, Result};
use crate::estimators::{chi_bar_hat, chi_hat, fit_pair, ucorr, BoundaryFlag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    ThetaA,
    ThetaS,
    ThetaF,
    Chi,
    ChiBar,
    #[serde(rename = "ucorr")]
    UCorr,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::ThetaA,
        Measure::ThetaS,
        Measure::ThetaF,
        Measure::Chi,
        Measure::ChiBar,
        Measure::UCorr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::ThetaA => "theta_a",
            Measure::ThetaS => "theta_s",
            Measure::ThetaF => "theta_f",
            Measure::Chi => "chi",
            Measure::ChiBar => "chi_bar",
            Measure::UCorr => "ucorr",
        }
    }

    /// Self-similarity, used on the diagonal.
    pub fn maximum(self) -> f64 {
        match self {
            Measure::ThetaA | Measure::ThetaS | Measure::ThetaF => THETA_MAX,
            _ => 1.0,
        }
    }

    /// Value assigned to pairs whose measure cannot be computed.
    pub fn floor(self) -> f64 {
        match self {
            Measure::ThetaA | Measure::ThetaS | Measure::ThetaF => THETA_MIN,
            Measure::Chi => 0.0,
            Measure::ChiBar | Measure::UCorr => -1.0,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown measure '{s}'")))
    }
}

/// Per-pair outcome recorded while building a matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDiagnostic {
    pub i: usize,
    pub j: usize,
    pub flag: Option<BoundaryFlag>,
    pub error: Option<String>,
}

/// Symmetric `k x k` matrix of one measure at one quadrant level.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub measure: Measure,
    pub q: QuadrantLevel,
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
    pub diagnostics: Vec<PairDiagnostic>,
}

impl SimilarityMatrix {
    pub fn k(&self) -> usize {
        self.values.nrows()
    }

    /// Pairs whose measure failed and were set to the floor.
    pub fn failures(&self) -> impl Iterator<Item = &PairDiagnostic> {
        self.diagnostics.iter().filter(|d| d.error.is_some())
    }
}

/// Value of `measure` on one pair, with its boundary flag when it has one.
pub fn pair_similarity(
    u: &PseudoMatrix,
    i: usize,
    j: usize,
    measure: Measure,
    q: QuadrantLevel,
) -> Result<(f64, Option<BoundaryFlag>)> {
    match measure {
        Measure::ThetaA | Measure::ThetaS | Measure::ThetaF => {
            let fit = fit_pair(u, i, j, q)?;
            Ok(match measure {
                Measure::ThetaA => (fit.theta_a.value(), Some(fit.boundary_flag())),
                Measure::ThetaS => (fit.theta_s.value(), Some(fit.theta_s_flag)),
                _ => (fit.theta_f.value(), Some(fit.theta_f_flag)),
            })
        }
        Measure::Chi => Ok((chi_hat(u, i, j, q)?, None)),
        Measure::ChiBar => {
            let cb = chi_bar_hat(u, i, j, q)?;
            let flag = cb.degenerate.then_some(BoundaryFlag::ClampedLow);
            Ok((cb.value, flag))
        }
        Measure::UCorr => Ok((ucorr(u, i, j, q)?, None)),
    }
}

/// Similarity matrix from pseudo-observations. Pairs are fit in parallel;
/// failures are recorded and set to the measure's floor.
pub fn build_similarity_pseudo(
    u: &PseudoMatrix,
    measure: Measure,
    q: QuadrantLevel,
) -> SimilarityMatrix {
    let k = u.n_cols();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .collect();
    let results: Vec<(f64, PairDiagnostic)> = pairs
        .par_iter()
        .map(|&(i, j)| match pair_similarity(u, i, j, measure, q) {
            Ok((v, flag)) => (
                v,
                PairDiagnostic {
                    i,
                    j,
                    flag,
                    error: None,
                },
            ),
            Err(e) => (
                measure.floor(),
                PairDiagnostic {
                    i,
                    j,
                    flag: None,
                    error: Some(e.to_string()),
                },
            ),
        })
        .collect();

    let mut values = DMatrix::from_element(k, k, 0.0);
    for d in 0..k {
        values[(d, d)] = measure.maximum();
    }
    let mut diagnostics = Vec::with_capacity(results.len());
    for (v, diag) in results {
        values[(diag.i, diag.j)] = v;
        values[(diag.j, diag.i)] = v;
        diagnostics.push(diag);
    }
    SimilarityMatrix {
        measure,
        q,
        names: u.names().to_vec(),
        values,
        diagnostics,
    }
}

/// Rank-transform `y` once and build the similarity matrix of `measure`.
pub fn build_similarity(y: &ScoreMatrix, measure: Measure, q: QuadrantLevel) -> SimilarityMatrix {
    build_similarity_pseudo(&rank_transform(y), measure, q)
}
