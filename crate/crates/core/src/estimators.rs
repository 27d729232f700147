//! Pairwise extremal-similarity estimators.
//!
//! * `theta_s`: maximizer of the survival-Clayton pseudo log-likelihood
//!   restricted to the upper quadrant `R_q`, normalized by the quadrant mass.
//! * `theta_f`: the parameter whose model quadrant mass `S_SC(q, q | t)`
//!   equals the empirical fraction `S_hat(q, q)`.
//! * `theta_a`: their unweighted mean.
//!
//! The baselines `chi(q)`, `chi_bar(q)` and the in-quadrant correlation
//! (UCorr) are computed from the same pseudo-observations.
//!
//! All parameters live in `[THETA_MIN, THETA_MAX]`; solutions that hit either
//! end are flagged.

use serde::Serialize;

use crate::copula::{
    log_clayton_density_ln, log_sc_survival_diag, survival_clayton_survival, Theta, UnitPoint,
    THETA_MAX, THETA_MIN,
};
use crate::empirical::{
    empirical_survival, marginal_exceedance, quadrant_points, PseudoMatrix, QuadrantLevel,
};
use crate::error::{Error, Result};
use crate::optimize::{bisect_increasing, brent_maximize};

/// Number of log-spaced points in the pre-scan of the likelihood.
const GRID_POINTS: usize = 20;
/// Absolute tolerance on the maximizing theta.
const THETA_S_XTOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryFlag {
    Interior,
    ClampedLow,
    ClampedHigh,
}

/// Quadrant-conditional survival-Clayton log-likelihood of a fixed sample.
///
/// `ln(1 - u)` is precomputed once so repeated evaluation in theta is cheap.
#[derive(Debug, Clone)]
pub struct QuadrantLikelihood {
    ln_v1: Vec<f64>,
    ln_v2: Vec<f64>,
    q: f64,
}

impl QuadrantLikelihood {
    pub fn new(points: &[UnitPoint], q: QuadrantLevel) -> Result<Self> {
        let qv = q.value();
        let mut ln_v1 = Vec::with_capacity(points.len());
        let mut ln_v2 = Vec::with_capacity(points.len());
        for p in points {
            if !(p.u1 >= qv && p.u2 >= qv && p.u1 <= 1.0 && p.u2 <= 1.0) {
                return Err(Error::OutsideQuadrant {
                    u1: p.u1,
                    u2: p.u2,
                    q: qv,
                });
            }
            if p.u1 == 1.0 || p.u2 == 1.0 {
                return Err(Error::BoundaryPoint { u1: p.u1, u2: p.u2 });
            }
            ln_v1.push((-p.u1).ln_1p());
            ln_v2.push((-p.u2).ln_1p());
        }
        Ok(QuadrantLikelihood {
            ln_v1,
            ln_v2,
            q: qv,
        })
    }

    pub fn n_q(&self) -> usize {
        self.ln_v1.len()
    }

    /// `sum_i [ln c_SC(u_i | t) - ln S_SC(q, q | t)]`.
    pub fn eval(&self, theta: f64) -> f64 {
        if self.ln_v1.is_empty() {
            return 0.0;
        }
        let dens: f64 = self
            .ln_v1
            .iter()
            .zip(&self.ln_v2)
            .map(|(&a, &b)| log_clayton_density_ln(a, b, theta))
            .sum();
        dens - self.n_q() as f64 * log_sc_survival_diag(self.q, theta)
    }
}

/// Pseudo log-likelihood of quadrant points under the conditional
/// survival-Clayton density.
pub fn quadrant_loglik(points: &[UnitPoint], q: QuadrantLevel, theta: Theta) -> Result<f64> {
    let t = theta.value();
    if !(THETA_MIN..=THETA_MAX).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "theta {t} outside [{THETA_MIN}, {THETA_MAX}]"
        )));
    }
    Ok(QuadrantLikelihood::new(points, q)?.eval(t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSFit {
    pub theta: Theta,
    pub loglik: f64,
    pub flag: BoundaryFlag,
    pub n_q: usize,
}

/// Maximum pseudo-likelihood estimate of theta from quadrant points.
pub fn fit_theta_s(points: &[UnitPoint], q: QuadrantLevel) -> Result<ThetaSFit> {
    let lik = QuadrantLikelihood::new(points, q)?;
    Ok(maximize_likelihood(&lik))
}

pub(crate) fn maximize_likelihood(lik: &QuadrantLikelihood) -> ThetaSFit {
    let n_q = lik.n_q();
    if n_q == 0 {
        return ThetaSFit {
            theta: Theta::min(),
            loglik: 0.0,
            flag: BoundaryFlag::ClampedLow,
            n_q,
        };
    }

    let (lmin, lmax) = (THETA_MIN.ln(), THETA_MAX.ln());
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| {
            if i == GRID_POINTS - 1 {
                THETA_MAX
            } else if i == 0 {
                THETA_MIN
            } else {
                (lmin + (lmax - lmin) * i as f64 / (GRID_POINTS - 1) as f64).exp()
            }
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| lik.eval(t)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > values[b] { i } else { b });

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(GRID_POINTS - 1)];
    let m = brent_maximize(|t| lik.eval(t), lo, hi, THETA_S_XTOL);

    let (low_v, high_v) = (values[0], values[GRID_POINTS - 1]);
    let (theta, loglik, flag) = if low_v >= m.value {
        (THETA_MIN, low_v, BoundaryFlag::ClampedLow)
    } else if high_v >= m.value {
        (THETA_MAX, high_v, BoundaryFlag::ClampedHigh)
    } else if m.x - THETA_MIN <= THETA_S_XTOL {
        (m.x, m.value, BoundaryFlag::ClampedLow)
    } else if THETA_MAX - m.x <= THETA_S_XTOL {
        (m.x, m.value, BoundaryFlag::ClampedHigh)
    } else {
        (m.x, m.value, BoundaryFlag::Interior)
    };
    ThetaSFit {
        theta: Theta::clamped(theta),
        loglik,
        flag,
        n_q,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaFFit {
    pub theta: Theta,
    pub flag: BoundaryFlag,
}

/// Solve `S_SC(q, q | t) = s_hat` for `t`.
///
/// Below the independence mass `(1-q)^2` the solution is `THETA_MIN`; at or
/// above the comonotone mass reachable inside the domain it is `THETA_MAX`.
pub fn fit_theta_f(s_hat: f64, q: QuadrantLevel) -> Result<ThetaFFit> {
    if !(0.0..=1.0).contains(&s_hat) {
        return Err(Error::InvalidParameter(format!(
            "empirical survival must lie in [0, 1], got {s_hat}"
        )));
    }
    let qv = q.value();
    let mass = |t: f64| (log_sc_survival_diag(qv, t)).exp();
    if s_hat <= (1.0 - qv).powi(2) || s_hat <= mass(THETA_MIN) {
        return Ok(ThetaFFit {
            theta: Theta::min(),
            flag: BoundaryFlag::ClampedLow,
        });
    }
    if s_hat >= 1.0 - qv || s_hat >= mass(THETA_MAX) {
        return Ok(ThetaFFit {
            theta: Theta::max(),
            flag: BoundaryFlag::ClampedHigh,
        });
    }
    let t = bisect_increasing(mass, s_hat, THETA_MIN, THETA_MAX, 1e-12, 1e-14);
    Ok(ThetaFFit {
        theta: Theta::clamped(t),
        flag: BoundaryFlag::Interior,
    })
}

/// The quadrant fit of one column pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantFit {
    pub theta_s: Theta,
    pub theta_f: Theta,
    pub theta_a: Theta,
    pub n_q: usize,
    pub q: QuadrantLevel,
    pub s_hat: f64,
    pub loglik_at_theta_s: f64,
    pub theta_s_flag: BoundaryFlag,
    pub theta_f_flag: BoundaryFlag,
}

impl QuadrantFit {
    /// Combined flag: clamped only when both components clamp the same way.
    pub fn boundary_flag(&self) -> BoundaryFlag {
        if self.theta_s_flag == self.theta_f_flag {
            self.theta_s_flag
        } else {
            BoundaryFlag::Interior
        }
    }
}

/// Quadrant points in a canonical order, so sums over them are exactly
/// invariant to row order and to swapping the pair.
fn sorted_quadrant_points(
    u: &PseudoMatrix,
    i: usize,
    j: usize,
    q: QuadrantLevel,
) -> Result<Vec<UnitPoint>> {
    let mut points = quadrant_points(u, i, j, q)?;
    let key = |p: &UnitPoint| (p.u1.min(p.u2), p.u1.max(p.u2));
    points.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    Ok(points)
}

/// Fit `theta_s`, `theta_f` and their mean on columns `i`, `j`.
pub fn fit_pair(u: &PseudoMatrix, i: usize, j: usize, q: QuadrantLevel) -> Result<QuadrantFit> {
    let points = sorted_quadrant_points(u, i, j, q)?;
    let s_fit = fit_theta_s(&points, q)?;
    let s_hat = empirical_survival(u, i, j, q.value(), q.value())?;
    let f_fit = fit_theta_f(s_hat, q)?;
    let theta_a = 0.5 * s_fit.theta.value() + 0.5 * f_fit.theta.value();
    Ok(QuadrantFit {
        theta_s: s_fit.theta,
        theta_f: f_fit.theta,
        theta_a: Theta::clamped(theta_a),
        n_q: s_fit.n_q,
        q,
        s_hat,
        loglik_at_theta_s: s_fit.loglik,
        theta_s_flag: s_fit.flag,
        theta_f_flag: f_fit.flag,
    })
}

/// Model quadrant mass at a fitted theta; convenience for round-trip checks.
pub fn model_quadrant_mass(q: QuadrantLevel, theta: Theta) -> f64 {
    survival_clayton_survival(q.value(), q.value(), theta).expect("q lies in (0, 1)")
}

/// `chi_hat(q) = S_hat(q, q) / P_hat(U_j >= q)`.
pub fn chi_hat(u: &PseudoMatrix, i: usize, j: usize, q: QuadrantLevel) -> Result<f64> {
    let s = empirical_survival(u, i, j, q.value(), q.value())?;
    let denom = marginal_exceedance(u, j, q.value());
    if denom == 0.0 {
        return Err(Error::EmptyExceedance(q.value()));
    }
    Ok(s / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiBar {
    pub value: f64,
    /// The quadrant was empty and the value was floored at -1.
    pub degenerate: bool,
}

/// `chi_bar_hat(q) = 2 ln P_hat(U_i >= q) / ln S_hat(q, q) - 1`, clamped to `[-1, 1]`.
pub fn chi_bar_hat(u: &PseudoMatrix, i: usize, j: usize, q: QuadrantLevel) -> Result<ChiBar> {
    let s = empirical_survival(u, i, j, q.value(), q.value())?;
    if s == 0.0 {
        log::warn!(
            "empty quadrant for columns ({i}, {j}) at q = {}; chi_bar floored at -1",
            q.value()
        );
        return Ok(ChiBar {
            value: -1.0,
            degenerate: true,
        });
    }
    if s == 1.0 {
        return Ok(ChiBar {
            value: 1.0,
            degenerate: false,
        });
    }
    let p = marginal_exceedance(u, i, q.value());
    let value = (2.0 * p.ln() / s.ln() - 1.0).clamp(-1.0, 1.0);
    Ok(ChiBar {
        value,
        degenerate: false,
    })
}

/// Pearson correlation of the pseudo-value pairs inside `R_q`.
pub fn ucorr(u: &PseudoMatrix, i: usize, j: usize, q: QuadrantLevel) -> Result<f64> {
    pearson(&sorted_quadrant_points(u, i, j, q)?)
}

pub(crate) fn pearson(points: &[UnitPoint]) -> Result<f64> {
    let n = points.len();
    if n < 3 {
        return Err(Error::UndefinedCorrelation(format!(
            "{n} points in the quadrant, need at least 3"
        )));
    }
    let nf = n as f64;
    let m1 = points.iter().map(|p| p.u1).sum::<f64>() / nf;
    let m2 = points.iter().map(|p| p.u2).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.u1 - m1, p.u2 - m2);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::UndefinedCorrelation(
            "zero variance inside the quadrant".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// The three baseline measures of one pair. `ucorr` is `None` when the
/// quadrant is too small or flat for a correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineMeasures {
    pub chi: f64,
    pub chi_bar: f64,
    pub ucorr: Option<f64>,
}

pub fn baseline_measures(
    u: &PseudoMatrix,
    i: usize,
    j: usize,
    q: QuadrantLevel,
) -> Result<BaselineMeasures> {
    Ok(BaselineMeasures {
        chi: chi_hat(u, i, j, q)?,
        chi_bar: chi_bar_hat(u, i, j, q)?.value,
        ucorr: ucorr(u, i, j, q).ok(),
    })
}
