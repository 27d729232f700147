#![allow(dead_code)]

use copula_quadrant::copula::{
    survival_clayton_cdf, survival_clayton_density, survival_clayton_survival,
};
use copula_quadrant::{PseudoMatrix, ScoreMatrix, Theta, UnitPoint};

pub fn theta(t: f64) -> Theta {
    Theta::new(t).unwrap()
}

pub fn pt(u1: f64, u2: f64) -> UnitPoint {
    UnitPoint { u1, u2 }
}

/// Rank-transformed two-column matrix from sampled points.
pub fn pseudo_from_points(points: &[UnitPoint]) -> PseudoMatrix {
    let y = ScoreMatrix::from_unnamed_columns(vec![
        points.iter().map(|p| p.u1).collect(),
        points.iter().map(|p| p.u2).collect(),
    ])
    .unwrap();
    copula_quadrant::rank_transform(&y)
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    for (k, &i) in idx.iter().enumerate() {
        r[i] = k as f64;
    }
    r
}

/// Spearman correlation for continuous (tie-free) data.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

/// Kendall's tau-a for tie-free data, counting discordant pairs by merge sort.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = ys.clone();
    let disc = count_inversions(&mut ys, &mut buf);
    let pairs = (n * (n - 1) / 2) as f64;
    (pairs - 2.0 * disc as f64) / pairs
}

fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (l, r) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        count_inversions(l, bl) + count_inversions(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[i] <= v[j] {
            buf[k] = v[i];
            i += 1;
        } else {
            buf[k] = v[j];
            inv += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    inv
}

/// Kolmogorov-Smirnov distance of a sample to Uniform(0, 1).
pub fn ks_uniform(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / n).abs().max(((i + 1) as f64 / n - v).abs()))
        .fold(0.0, f64::max)
}

/// Exhaustive AUC: each (positive, negative) pair scores 1, 1/2 or 0.
pub fn auc_bruteforce(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            den += 1.0;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / den
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite rule on [a, b]: panels graded geometrically toward both ends
/// (ratio 1/4 per level, `levels` levels each side) plus uniform interior
/// panels, each with an `order`-point Gauss-Legendre rule.
pub fn graded_rule(
    a: f64,
    b: f64,
    levels: usize,
    interior: usize,
    order: usize,
) -> Vec<(f64, f64)> {
    let len = b - a;
    let mut cuts = vec![0.0, 1.0];
    let edge = 0.1;
    for l in 0..levels {
        let h = edge * 0.25f64.powi(l as i32);
        cuts.push(h);
        cuts.push(1.0 - h);
    }
    for m in 1..interior {
        cuts.push(edge + (1.0 - 2.0 * edge) * m as f64 / interior as f64);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let gl = gauss_legendre(order);
    let mut rule = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (a + len * w[0], a + len * w[1]);
        let half = 0.5 * (hi - lo);
        for &(x, wt) in &gl {
            rule.push((lo + half * (x + 1.0), wt * half));
        }
    }
    rule
}

/// Tensor-product integral of the survival-Clayton density over [lo, 1]^2.
pub fn integrate_sc_density(lo: f64, t: Theta) -> (f64, usize) {
    let rule = graded_rule(lo, 1.0, 12, 6, 10);
    let mut acc = 0.0;
    for &(x, wx) in &rule {
        for &(y, wy) in &rule {
            acc += wx * wy * survival_clayton_density(pt(x, y), t).unwrap();
        }
    }
    (acc, rule.len())
}

/// Largest violation of copula axioms of the survival Clayton CDF on a
/// `m x m` grid (including the edges): negative rectangle mass, grounding
/// and margin errors.
pub fn sc_axiom_violation(t: Theta, m: usize) -> f64 {
    let g: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let c = |a: f64, b: f64| survival_clayton_cdf(pt(a, b), t);
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let vol = c(g[i + 1], g[j + 1]) - c(g[i], g[j + 1]) - c(g[i + 1], g[j]) + c(g[i], g[j]);
            worst = worst.max(-vol);
        }
    }
    for &v in &g {
        worst = worst.max(c(v, 0.0).abs()).max(c(0.0, v).abs());
        worst = worst.max((c(v, 1.0) - v).abs()).max((c(1.0, v) - v).abs());
    }
    worst
}

/// Largest gap between `S(q1, q2)` and `C(q1, q2) + 1 - q1 - q2` on a grid.
pub fn sc_survival_cdf_gap(t: Theta, m: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=m {
        for j in 0..=m {
            let (a, b) = (i as f64 / m as f64, j as f64 / m as f64);
            let s = survival_clayton_survival(a, b, t).unwrap();
            let c = survival_clayton_cdf(pt(a, b), t);
            worst = worst.max((s - (c + 1.0 - a - b)).abs());
        }
    }
    worst
}

/// True when `theta -> S(q, q | theta)` strictly increases over a log grid
/// of `[1e-3, 50]`.
pub fn sc_survival_increasing(q: f64, points: usize) -> bool {
    let grid: Vec<f64> = (0..points)
        .map(|i| {
            (1e-3f64.ln() + (50f64.ln() - 1e-3f64.ln()) * i as f64 / (points - 1) as f64).exp()
        })
        .collect();
    let s: Vec<f64> = grid
        .iter()
        .map(|&t| survival_clayton_survival(q, q, theta(t)).unwrap())
        .collect();
    s.windows(2).all(|w| w[1] > w[0])
}
