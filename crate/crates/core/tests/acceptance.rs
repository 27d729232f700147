//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::time::{Duration, Instant};

use common::*;
use copula_quadrant::cli::{run_measure, run_pipeline, PipelineConfig};
use copula_quadrant::clustering::spectral_embed;
use copula_quadrant::copula::{
    sample_gaussian_copula, sample_survival_clayton, survival_clayton_density,
};
use copula_quadrant::datagen::{gen_mixture, Generator, MixtureConfig};
use copula_quadrant::ensemble::{auc_roc, Across, Within};
use copula_quadrant::estimators::{chi_hat, fit_theta_f, fit_theta_s};
use copula_quadrant::{
    build_similarity_pseudo, fit_pair, rank_transform, Measure, QuadrantLevel, Rho, UnitPoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEEDS: std::ops::Range<u64> = 0..10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn lvl(q: f64) -> QuadrantLevel {
    QuadrantLevel::new(q).unwrap()
}

fn ac1() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for t in [0.1, 1.0, 5.0] {
        let v = sc_axiom_violation(theta(t), 50);
        let gap = sc_survival_cdf_gap(theta(t), 50);
        let (mass, _) = integrate_sc_density(0.0, theta(t));
        let mut quad = 0.0f64;
        for q in [0.5, 0.75, 0.9] {
            let (m, _) = integrate_sc_density(q, theta(t));
            let s = copula_quadrant::copula::survival_clayton_survival(q, q, theta(t)).unwrap();
            quad = quad.max((m - s).abs());
        }
        // reflected-density symmetry on a grid
        let mut sym = 0.0f64;
        for i in 1..20 {
            for j in 1..20 {
                let (a, b) = (i as f64 / 20.0, j as f64 / 20.0);
                let x = survival_clayton_density(pt(a, b), theta(t)).unwrap();
                let y = survival_clayton_density(pt(b, a), theta(t)).unwrap();
                sym = sym.max((x - y).abs() / x);
            }
        }
        let ok =
            v < 1e-14 && gap < 1e-12 && (mass - 1.0).abs() < 1e-3 && quad < 1e-3 && sym < 1e-12;
        pass &= ok;
        notes.push(format!(
            "theta={t}: axioms {v:.1e}, S/C gap {gap:.1e}, mass {mass:.6}, quadrant err {quad:.1e}"
        ));
    }
    for q in [0.05, 0.5, 0.75, 0.9, 0.99] {
        if !sc_survival_increasing(q, 400) {
            pass = false;
            notes.push(format!("S(q,q) not increasing at q={q}"));
        }
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn median_rel_error(t0: f64, n: usize) -> f64 {
    let mut errs: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|s| {
            let pts = sample_survival_clayton(n, theta(t0), 10_000 * n as u64 + s).unwrap();
            let fit = fit_pair(&pseudo_from_points(&pts), 0, 1, lvl(0.75)).unwrap();
            (fit.theta_a.value() - t0).abs() / t0
        })
        .collect();
    median(&mut errs)
}

fn ac2() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for t0 in [0.5, 1.0, 2.0, 5.0] {
        let (big, small) = (median_rel_error(t0, 5000), median_rel_error(t0, 500));
        pass &= big < 0.15 && big < small;
        notes.push(format!("theta0={t0}: n=5000 {big:.4}, n=500 {small:.4}"));
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn ac3() -> Outcome {
    let q = lvl(0.75);
    let (a, b): (Vec<f64>, Vec<f64>) = (0..2000u64)
        .into_par_iter()
        .map(|s| {
            let pts = sample_survival_clayton(1000, theta(1.0), 7_000_000 + s).unwrap();
            let inside: Vec<UnitPoint> = pts
                .into_iter()
                .filter(|p| p.u1 >= 0.75 && p.u2 >= 0.75)
                .collect();
            let ts = fit_theta_s(&inside, q).unwrap().theta.value();
            let tf = fit_theta_f(inside.len() as f64 / 1000.0, q)
                .unwrap()
                .theta
                .value();
            (ts, tf)
        })
        .unzip();
    let r = pearson(&a, &b);
    Outcome {
        pass: r.abs() < 0.07,
        detail: format!("corr(theta_s, theta_f) = {r:.4}"),
    }
}

/// DB index per measure for one generated dataset.
fn db_indices(g: Generator, seed: u64, measures: &[Measure]) -> Vec<f64> {
    let cfg = PipelineConfig {
        generate: Some(g),
        seed,
        ..PipelineConfig::default()
    };
    let bundle = copula_quadrant::cli::load_dataset(&cfg).unwrap();
    let u = rank_transform(&bundle.scores);
    measures
        .iter()
        .map(|&m| {
            let w = build_similarity_pseudo(&u, m, lvl(0.75));
            let e = spectral_embed(&w, 1).unwrap();
            copula_quadrant::cli::embedding_db_index(
                &e,
                &bundle.detector_cluster_labels,
                cfg.db_spread,
            )
            .unwrap_or(f64::INFINITY)
        })
        .collect()
}

fn ac4() -> Outcome {
    let ms = [
        Measure::ThetaA,
        Measure::UCorr,
        Measure::ChiBar,
        Measure::Chi,
    ];
    let mut good = 0;
    let mut notes = Vec::new();
    for seed in SEEDS {
        let d = db_indices(Generator::Block, seed, &ms);
        let ok = d[0] < d[2] && d[0] < d[3] && d[2] > 10.0 * d[0];
        good += ok as usize;
        notes.push(format!(
            "seed {seed}: {:.4}/{:.4}/{:.3}/{:.3}",
            d[0], d[1], d[2], d[3]
        ));
    }
    Outcome {
        pass: good >= 8,
        detail: format!(
            "{good}/10 seeds (DB theta_a/ucorr/chi_bar/chi: {})",
            notes.join(", ")
        ),
    }
}

fn ac5() -> Outcome {
    let ms = [Measure::ThetaA, Measure::UCorr];
    let mut good = 0;
    let mut notes = Vec::new();
    for seed in SEEDS {
        let d = db_indices(Generator::TwoAnom, seed, &ms);
        good += (d[0] < 0.05 && d[0] <= d[1]) as usize;
        notes.push(format!("seed {seed}: {:.4}/{:.4}", d[0], d[1]));
    }
    Outcome {
        pass: good >= 8,
        detail: format!("{good}/10 seeds (DB theta_a/ucorr: {})", notes.join(", ")),
    }
}

fn ac6() -> Outcome {
    let cfg = MixtureConfig::default();
    let mut good = 0;
    let mut notes = Vec::new();
    for seed in SEEDS {
        let b = gen_mixture(&cfg, seed).unwrap();
        let w = build_similarity_pseudo(&rank_transform(&b.scores), Measure::ThetaA, lvl(0.75));
        let (mut ss, mut nn, mut sn) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..8 {
            for j in (i + 1)..8 {
                let v = w.values[(i, j)];
                match (i < cfg.dim_spiked, j < cfg.dim_spiked) {
                    (true, true) => ss.push(v),
                    (false, false) => nn.push(v),
                    _ => sn.push(v),
                }
            }
        }
        let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        good += (lo(&ss) > hi(&nn) && lo(&nn) > hi(&sn)) as usize;
        notes.push(format!(
            "seed {seed}: SS [{:.3},{:.3}] NN [{:.3},{:.3}] SN [{:.3},{:.3}]",
            lo(&ss),
            hi(&ss),
            lo(&nn),
            hi(&nn),
            lo(&sn),
            hi(&sn)
        ));
    }
    Outcome {
        pass: good >= 8,
        detail: format!("{good}/10 seeds ({})", notes.join(", ")),
    }
}

fn ac7() -> Outcome {
    let mut recovered = 0;
    let mut mean_max = Vec::new();
    let mut all_mean = Vec::new();
    let mut beats_all_max = true;
    let mut notes = Vec::new();
    for seed in SEEDS {
        let cfg = PipelineConfig {
            generate: Some(Generator::TEnsemble),
            seed,
            ..PipelineConfig::default()
        };
        let bundle = copula_quadrant::cli::load_dataset(&cfg).unwrap();
        let u = rank_transform(&bundle.scores);
        let run = run_measure(&u, &bundle, Measure::ThetaA, lvl(0.75), &cfg).unwrap();
        let db = &run.dbscan;
        let truth = &bundle.detector_cluster_labels;
        let exact = db.n_clusters() == 4
            && db.n_noise() == 50
            && (0..truth.len()).all(|i| {
                (0..truth.len()).all(|j| {
                    (truth[i].is_some() && truth[i] == truth[j])
                        == (db.labels[i].is_some() && db.labels[i] == db.labels[j])
                })
            });
        let outliers = bundle.outlier_labels.as_ref().unwrap();
        let auc = |w: Within, a: Across| {
            let s = run
                .ensembles
                .iter()
                .find(|(ew, ea, _)| *ew == w && *ea == a)
                .map(|(_, _, s)| s)
                .unwrap();
            auc_roc(s, outliers).unwrap().auc
        };
        let (mm, am, ax) = (
            auc(Within::Mean, Across::Max),
            auc(Within::All, Across::Mean),
            auc(Within::All, Across::Max),
        );
        notes.push(format!(
            "seed {seed}: {} mean/max {mm:.4} all/mean {am:.4} all/max {ax:.4}",
            if exact { "exact" } else { "not recovered" }
        ));
        if exact {
            recovered += 1;
            mean_max.push(mm);
            all_mean.push(am);
            beats_all_max &= mm > ax;
        }
    }
    let (mm, am) = (mean(&mean_max), mean(&all_mean));
    let pass = recovered >= 8 && mm >= 0.95 && (0.55..=0.80).contains(&am) && beats_all_max;
    Outcome {
        pass,
        detail: format!(
            "clusters recovered {recovered}/10; mean AUC over recovered seeds: mean-within/max-across {mm:.4}, all/mean {am:.4}; {}",
            notes.join(", ")
        ),
    }
}

fn ac8() -> Outcome {
    let sc = pseudo_from_points(&sample_survival_clayton(100_000, theta(1.0), 81).unwrap());
    let c99 = chi_hat(&sc, 0, 1, lvl(0.99)).unwrap();
    let ga =
        pseudo_from_points(&sample_gaussian_copula(100_000, Rho::new(0.8).unwrap(), 82).unwrap());
    let (g75, g99) = (
        chi_hat(&ga, 0, 1, lvl(0.75)).unwrap(),
        chi_hat(&ga, 0, 1, lvl(0.99)).unwrap(),
    );
    Outcome {
        pass: (0.42..=0.58).contains(&c99) && g99 < g75,
        detail: format!("survival Clayton chi(0.99) = {c99:.4}; Gaussian chi(0.75) = {g75:.4}, chi(0.99) = {g99:.4}"),
    }
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut exact = 0;
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(2..=200);
        let s: Vec<f64> = (0..n)
            .map(|_| f64::from(rng.random_range(0..20u8)))
            .collect();
        let l: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
        if !l.iter().any(|&x| x) || l.iter().all(|&x| x) {
            continue;
        }
        done += 1;
        exact += (auc_roc(&s, &l).unwrap().auc == auc_bruteforce(&s, &l)) as usize;
    }
    Outcome {
        pass: exact == 100,
        detail: format!("{exact}/100 instances exact"),
    }
}

fn ac10() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let cfg = PipelineConfig {
            generate: Some(Generator::TEnsemble),
            seed: 10,
            measures: Measure::ALL.to_vec(),
            q: vec![0.75, 0.9],
            out: dir.path().join(run),
            ..PipelineConfig::default()
        };
        run_pipeline(&cfg).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&cfg.out)
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(&p).unwrap(),
                )
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    let n = outputs[0].len();
    Outcome {
        pass: n > 0 && outputs[0] == outputs[1],
        detail: format!("{n} files compared"),
    }
}

type Criterion = (&'static str, &'static str, fn() -> Outcome, u64);

fn main() {
    // `cargo test` passes harness flags; a name filter selects criteria
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria: [Criterion; 10] = [
        ("AC1", "analytic copula suite", ac1, 10),
        ("AC2", "estimator consistency", ac2, 120),
        ("AC3", "theta_s/theta_f near-independence", ac3, 180),
        ("AC4", "block dataset DB ordering", ac4, 120),
        ("AC5", "two-anomaly dataset DB", ac5, 180),
        ("AC6", "mixture pair-type separation", ac6, 300),
        ("AC7", "ensemble simulation", ac7, 300),
        ("AC8", "chi model curves", ac8, 300),
        ("AC9", "AUC oracle equivalence", ac9, 300),
        ("AC10", "end-to-end determinism", ac10, 300),
    ];
    let mut failed = 0;
    for (id, name, f, limit) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| id.eq_ignore_ascii_case(x)) {
            continue;
        }
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(limit);
        let pass = out.pass && in_time;
        failed += (!pass) as usize;
        println!(
            "{id} {} {name} [{:.1}s{}] {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            if in_time {
                String::new()
            } else {
                format!(" > {limit}s limit")
            },
            out.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
