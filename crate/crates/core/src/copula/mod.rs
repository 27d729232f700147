//! Bivariate Gaussian, Clayton and survival-Clayton copulas.
//!
//! The survival Clayton copula is the point reflection of the Clayton copula
//! through (1/2, 1/2). It moves Clayton's lower-tail dependence into the
//! upper corner, which is where joint anomaly-score extremes live:
//!
//! ```text
//! C_SC(u1, u2 | t) = C_Clay(1 - u1, 1 - u2 | t) + u1 + u2 - 1
//! S_SC(q1, q2 | t) = P(U1 > q1, U2 > q2) = C_Clay(1 - q1, 1 - q2 | t)
//! ```
//!
//! Clayton quantities are evaluated in log space so that large association
//! parameters do not overflow `u^-t` near the corners.

pub mod normal;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};

/// Lower bound of the association-parameter domain used by all fits.
pub const THETA_MIN: f64 = 1e-6;
/// Upper bound of the association-parameter domain; `2^(-1/50)` is ~0.986,
/// effectively comonotone.
pub const THETA_MAX: f64 = 50.0;

/// Clayton association parameter, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Theta(f64);

impl Theta {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Theta(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "Clayton theta must be finite and > 0, got {value}"
            )))
        }
    }

    /// Clamp an arbitrary value into `[THETA_MIN, THETA_MAX]`.
    pub fn clamped(value: f64) -> Self {
        if value.is_nan() {
            return Theta(THETA_MIN);
        }
        Theta(value.clamp(THETA_MIN, THETA_MAX))
    }

    pub fn min() -> Self {
        Theta(THETA_MIN)
    }

    pub fn max() -> Self {
        Theta(THETA_MAX)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Gaussian copula correlation, strictly inside (-1, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rho(f64);

impl Rho {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value.abs() < 1.0 {
            Ok(Rho(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "Gaussian rho must lie in (-1, 1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A point of the closed unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    pub u1: f64,
    pub u2: f64,
}

impl UnitPoint {
    pub fn new(u1: f64, u2: f64) -> Result<Self> {
        let ok = |u: f64| u.is_finite() && (0.0..=1.0).contains(&u);
        if ok(u1) && ok(u2) {
            Ok(UnitPoint { u1, u2 })
        } else {
            Err(Error::InvalidInput(format!(
                "({u1}, {u2}) is not a point of the unit square"
            )))
        }
    }

    /// Componentwise reflection `(1 - u1, 1 - u2)`.
    pub fn reflect(self) -> Self {
        UnitPoint {
            u1: 1.0 - self.u1,
            u2: 1.0 - self.u2,
        }
    }

    fn is_interior(self) -> bool {
        self.u1 > 0.0 && self.u1 < 1.0 && self.u2 > 0.0 && self.u2 < 1.0
    }
}

/// `ln(u1^-t + u2^-t - 1)` from `ln u1`, `ln u2` (both <= 0).
pub(crate) fn log_clayton_core(ln_u1: f64, ln_u2: f64, theta: f64) -> f64 {
    let a = -theta * ln_u1;
    let b = -theta * ln_u2;
    let m = a.max(b);
    if m < 1.0 {
        (a.exp_m1() + b.exp_m1()).ln_1p()
    } else {
        m + ((a - m).exp() + (b - m).exp() - (-m).exp()).ln()
    }
}

/// `ln c_Clay(u1, u2 | t)` from `ln u1`, `ln u2`.
pub(crate) fn log_clayton_density_ln(ln_u1: f64, ln_u2: f64, theta: f64) -> f64 {
    (theta + 1.0).ln()
        - (theta + 1.0) * (ln_u1 + ln_u2)
        - (1.0 / theta + 2.0) * log_clayton_core(ln_u1, ln_u2, theta)
}

/// `ln S_SC(q, q | t)`, the log probability of the upper q-quadrant.
pub(crate) fn log_sc_survival_diag(q: f64, theta: f64) -> f64 {
    let l = (-q).ln_1p();
    -log_clayton_core(l, l, theta) / theta
}

/// Clayton copula CDF; zero on the lower and left edges.
pub fn clayton_cdf(p: UnitPoint, theta: Theta) -> f64 {
    if p.u1 == 0.0 || p.u2 == 0.0 {
        return 0.0;
    }
    let t = theta.value();
    let v = (-log_clayton_core(p.u1.ln(), p.u2.ln(), t) / t).exp();
    v.min(p.u1).min(p.u2)
}

/// Clayton copula density `(t+1)(u1 u2)^(-t-1)(u1^-t + u2^-t - 1)^(-1/t-2)`.
pub fn clayton_density(p: UnitPoint, theta: Theta) -> Result<f64> {
    if !p.is_interior() {
        return Err(Error::BoundaryPoint { u1: p.u1, u2: p.u2 });
    }
    Ok(log_clayton_density_ln(p.u1.ln(), p.u2.ln(), theta.value()).exp())
}

/// Survival Clayton copula CDF.
pub fn survival_clayton_cdf(p: UnitPoint, theta: Theta) -> f64 {
    let v = clayton_cdf(p.reflect(), theta) + p.u1 + p.u2 - 1.0;
    v.clamp(0.0, p.u1.min(p.u2))
}

/// Survival Clayton density, the reflection of the Clayton density.
pub fn survival_clayton_density(p: UnitPoint, theta: Theta) -> Result<f64> {
    if !p.is_interior() {
        return Err(Error::BoundaryPoint { u1: p.u1, u2: p.u2 });
    }
    Ok(log_clayton_density_ln((-p.u1).ln_1p(), (-p.u2).ln_1p(), theta.value()).exp())
}

/// `S_SC(q1, q2 | t) = P(U1 > q1, U2 > q2)` under the survival Clayton copula.
///
/// Strictly increasing in `t` for `q1 = q2` in (0, 1), from `(1-q)^2` at
/// independence to `1-q` at comonotonicity.
pub fn survival_clayton_survival(q1: f64, q2: f64, theta: Theta) -> Result<f64> {
    let p = UnitPoint::new(q1, q2)?;
    Ok(clayton_cdf(p.reflect(), theta))
}

/// Gaussian copula CDF `Phi_rho(Phi^-1(u1), Phi^-1(u2))`.
pub fn gaussian_copula_cdf(p: UnitPoint, rho: Rho) -> f64 {
    if p.u1 == 0.0 || p.u2 == 0.0 {
        return 0.0;
    }
    if p.u1 == 1.0 {
        return p.u2;
    }
    if p.u2 == 1.0 {
        return p.u1;
    }
    let v = normal::bvn_lower(normal::phi_inv(p.u1), normal::phi_inv(p.u2), rho.value());
    v.clamp(0.0, p.u1.min(p.u2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CopulaFamily {
    Gaussian(Rho),
    SurvivalClayton(Theta),
}

impl CopulaFamily {
    /// Limit of `P(U1 > q | U2 > q)` as `q -> 1`.
    pub fn upper_tail_limit(self) -> f64 {
        match self {
            CopulaFamily::Gaussian(_) => 0.0,
            CopulaFamily::SurvivalClayton(t) => (-std::f64::consts::LN_2 / t.value()).exp(),
        }
    }
}

/// Upper tail dependence coefficient of a family.
pub fn upper_tail_limit(family: CopulaFamily) -> f64 {
    family.upper_tail_limit()
}

/// Draws from the survival Clayton copula using the caller's generator.
///
/// Marshall-Olkin frailty: with `V ~ Gamma(1/t, 1)` and independent unit
/// exponentials `E1, E2`, `(1 + E_i/V)^(-1/t)` is Clayton; reflecting gives
/// the survival copula.
pub fn sample_survival_clayton_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    theta: Theta,
) -> Vec<UnitPoint> {
    let t = theta.value();
    let frailty = Gamma::new(1.0 / t, 1.0).expect("shape 1/theta is finite and positive");
    (0..n)
        .map(|_| {
            let v: f64 = frailty.sample(rng);
            let mut clay = [0.0; 2];
            for c in clay.iter_mut() {
                let e: f64 = Exp1.sample(rng);
                *c = if v > 0.0 {
                    (-(e / v).ln_1p() / t).exp()
                } else {
                    0.0
                };
            }
            UnitPoint {
                u1: 1.0 - clay[0],
                u2: 1.0 - clay[1],
            }
        })
        .collect()
}

/// `n` i.i.d. survival Clayton draws, deterministic in `seed`.
pub fn sample_survival_clayton(n: usize, theta: Theta, seed: u64) -> Result<Vec<UnitPoint>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_survival_clayton_with(&mut rng, n, theta))
}

/// Draws from the Gaussian copula using the caller's generator.
pub fn sample_gaussian_copula_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    rho: Rho,
) -> Vec<UnitPoint> {
    let r = rho.value();
    let s = (1.0 - r * r).sqrt();
    (0..n)
        .map(|_| {
            let z1: f64 = StandardNormal.sample(rng);
            let e: f64 = StandardNormal.sample(rng);
            let z2 = r * z1 + s * e;
            UnitPoint {
                u1: normal::phi(z1),
                u2: normal::phi(z2),
            }
        })
        .collect()
}

/// `n` i.i.d. Gaussian copula draws, deterministic in `seed`.
pub fn sample_gaussian_copula(n: usize, rho: Rho, seed: u64) -> Result<Vec<UnitPoint>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_gaussian_copula_with(&mut rng, n, rho))
}
