//! Rank transform to pseudo-observations and the empirical copula and
//! survival function of a column pair.
//!
//! Quadrant membership is closed: a row belongs to `R_q` when both
//! pseudo-values are `>= q`. The same convention is used by
//! [`quadrant_points`] and [`empirical_survival`], so `n_q = n * S_hat(q, q)`
//! holds exactly.

use crate::copula::UnitPoint;
use crate::error::{Error, Result};

/// Raw anomaly scores, one column per detector; higher means more anomalous.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    /// Build from columns. Requires at least two rows and two columns of
    /// equal length with finite entries.
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        validate_shape(&names, &columns)?;
        for (j, col) in columns.iter().enumerate() {
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite score at row {i}, column '{}'",
                    names[j]
                )));
            }
        }
        Ok(ScoreMatrix { names, columns })
    }

    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let k = names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); k];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            for (c, &v) in columns.iter_mut().zip(row) {
                c.push(v);
            }
        }
        Self::from_columns(names, columns)
    }

    /// Columns named `s0, s1, ...`.
    pub fn from_unnamed_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let names = (0..columns.len()).map(|j| format!("s{j}")).collect();
        Self::from_columns(names, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Apply `f` elementwise to every column.
    pub fn map(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| c.iter().map(|&v| f(j, v)).collect())
            .collect();
        Self::from_columns(self.names.clone(), columns)
    }

    /// Reorder rows by `perm`, where row `r` of the result is row `perm[r]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|c| perm.iter().map(|&r| c[r]).collect())
            .collect();
        Self::from_columns(self.names.clone(), columns)
    }
}

/// Pseudo-observations in (0, 1), one column per detector.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl PseudoMatrix {
    /// Wrap externally supplied pseudo-values. Entries outside `[0, 1]` are
    /// clamped with a warning.
    pub fn from_columns(names: Vec<String>, mut columns: Vec<Vec<f64>>) -> Result<Self> {
        validate_shape(&names, &columns)?;
        let mut clamped = 0usize;
        for col in columns.iter_mut() {
            for v in col.iter_mut() {
                if !v.is_finite() {
                    return Err(Error::InvalidInput("non-finite pseudo-value".into()));
                }
                if *v < 0.0 || *v > 1.0 {
                    *v = v.clamp(0.0, 1.0);
                    clamped += 1;
                }
            }
        }
        if clamped > 0 {
            log::warn!("clamped {clamped} pseudo-values into [0, 1]");
        }
        Ok(PseudoMatrix { names, columns })
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Select a subset of columns.
    pub fn select(&self, cols: &[usize]) -> Self {
        PseudoMatrix {
            names: cols.iter().map(|&j| self.names[j].clone()).collect(),
            columns: cols.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }

    pub(crate) fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let k = self.n_cols();
        for index in [i, j] {
            if index >= k {
                return Err(Error::ColumnOutOfRange { index, k });
            }
        }
        if i == j {
            return Err(Error::SameColumn(i));
        }
        Ok(())
    }
}

fn validate_shape(names: &[String], columns: &[Vec<f64>]) -> Result<()> {
    if columns.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 columns, got {}",
            columns.len()
        )));
    }
    if names.len() != columns.len() {
        return Err(Error::InvalidInput(format!(
            "{} column names for {} columns",
            names.len(),
            columns.len()
        )));
    }
    let n = columns[0].len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 rows, got {n}"
        )));
    }
    if let Some(j) = columns.iter().position(|c| c.len() != n) {
        return Err(Error::InvalidInput(format!(
            "column '{}' has {} rows, expected {n}",
            names[j],
            columns[j].len()
        )));
    }
    Ok(())
}

/// Quadrant level `q` in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QuadrantLevel(f64);

impl QuadrantLevel {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q < 1.0 {
            Ok(QuadrantLevel(q))
        } else {
            Err(Error::InvalidParameter(format!(
                "q must lie in (0, 1), got {q}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for QuadrantLevel {
    fn default() -> Self {
        QuadrantLevel(0.75)
    }
}

/// Empirical CDF transform of one column: `#{k : y_k <= y_i} / (n + 1)`.
/// Tied scores share the larger rank.
pub fn rank_column(col: &[f64]) -> Vec<f64> {
    let n = col.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
    let denom = (n + 1) as f64;
    let mut out = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && col[order[end]] == col[order[start]] {
            end += 1;
        }
        let v = end as f64 / denom;
        for &idx in &order[start..end] {
            out[idx] = v;
        }
        start = end;
    }
    out
}

/// Columnwise rank transform of a score matrix.
pub fn rank_transform(y: &ScoreMatrix) -> PseudoMatrix {
    PseudoMatrix {
        names: y.names.clone(),
        columns: y.columns.iter().map(|c| rank_column(c)).collect(),
    }
}

/// `C_hat(q1, q2)`: fraction of rows with both pseudo-values at or below the levels.
pub fn empirical_copula(u: &PseudoMatrix, i: usize, j: usize, q1: f64, q2: f64) -> Result<f64> {
    u.check_pair(i, j)?;
    let (a, b) = (u.column(i), u.column(j));
    let count = a
        .iter()
        .zip(b)
        .filter(|(&x, &y)| x <= q1 && y <= q2)
        .count();
    Ok(count as f64 / u.n_rows() as f64)
}

/// `S_hat(q1, q2)`: fraction of rows with both pseudo-values at or above the levels.
pub fn empirical_survival(u: &PseudoMatrix, i: usize, j: usize, q1: f64, q2: f64) -> Result<f64> {
    u.check_pair(i, j)?;
    let (a, b) = (u.column(i), u.column(j));
    let count = a
        .iter()
        .zip(b)
        .filter(|(&x, &y)| x >= q1 && y >= q2)
        .count();
    Ok(count as f64 / u.n_rows() as f64)
}

/// Fraction of rows with column `j` at or above `q`.
pub fn marginal_exceedance(u: &PseudoMatrix, j: usize, q: f64) -> f64 {
    let c = u.column(j);
    c.iter().filter(|&&x| x >= q).count() as f64 / c.len() as f64
}

/// Rows of the pair that fall in the closed quadrant `[q, 1]^2`.
pub fn quadrant_points(
    u: &PseudoMatrix,
    i: usize,
    j: usize,
    q: QuadrantLevel,
) -> Result<Vec<UnitPoint>> {
    u.check_pair(i, j)?;
    let q = q.value();
    Ok(u.column(i)
        .iter()
        .zip(u.column(j))
        .filter(|(&x, &y)| x >= q && y >= q)
        .map(|(&x, &y)| UnitPoint { u1: x, u2: y })
        .collect())
}
