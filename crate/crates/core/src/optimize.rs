//! Bounded one-dimensional maximization and monotone root finding.

/// Result of a bounded maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximize `f` on `[lo, hi]` with Brent's method (golden section plus
/// successive parabolic interpolation). Converges to a local maximum, so
/// callers should bracket the global one first.
pub fn brent_maximize(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> Maximum {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    const MAX_ITER: usize = 500;
    let mut neg = |x: f64| -f(x);

    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = neg(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut evaluations = 1;

    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        let tol1 = 1e-10 * x.abs() + xtol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = neg(u);
        evaluations += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Maximum {
        x,
        value: -fx,
        evaluations,
    }
}

/// Root of an increasing function `g(x) = target` on `[lo, hi]` by
/// bisection, assuming `g(lo) < target < g(hi)`. Stops when the bracket is
/// narrower than `xtol` or `g` hits the target within `ytol`.
pub fn bisect_increasing(
    mut g: impl FnMut(f64) -> f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    ytol: f64,
) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if (gm - target).abs() <= ytol {
            return mid;
        }
        if gm < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= xtol {
            break;
        }
    }
    0.5 * (lo + hi)
}
