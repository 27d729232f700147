use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use copula_quadrant::cli::{
    emit_curves, generate_bundle, load_dataset, run_pipeline, write_bundle, write_curves,
    PipelineConfig,
};
use copula_quadrant::datagen::Generator;
use copula_quadrant::ensemble::{Across, Within};
use copula_quadrant::{rank_transform, Error, Measure, Result};

#[derive(Parser)]
#[command(
    name = "cqs",
    version,
    about = "Upper-quadrant copula similarity for anomaly scores"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Similarity matrices, embeddings, DB indices, DBSCAN and ensembles.
    Run(RunArgs),
    /// theta_s, theta_f, theta_a, chi, chi_bar and UCorr of one pair over a q grid.
    Curves(CurvesArgs),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Scores CSV: header of detector names, one row per observation.
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// block, mixture, two_anom or t_ensemble.
    #[arg(long)]
    generate: Option<Generator>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    source: SourceArgs,
    /// Repeatable: theta_a, theta_s, theta_f, chi, chi_bar, ucorr.
    #[arg(long = "measure")]
    measures: Vec<Measure>,
    /// Repeatable quadrant level in (0, 1).
    #[arg(long = "q")]
    q: Vec<f64>,
    /// Reference detector clusters, one per line.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Outlier flags (0/1), one per row.
    #[arg(long)]
    outlier_labels: Option<PathBuf>,
    #[arg(long)]
    embed_dim: Option<usize>,
    #[arg(long)]
    dbscan_eps: Option<f64>,
    #[arg(long)]
    dbscan_minpts: Option<usize>,
    #[arg(long)]
    ensemble_within: Option<Within>,
    #[arg(long)]
    ensemble_across: Option<Across>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    i: usize,
    #[arg(long)]
    j: usize,
    /// Repeatable; defaults to 0.50, 0.51, ..., 0.99.
    #[arg(long = "q")]
    q: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    generate: Generator,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn apply_source(cfg: &mut PipelineConfig, s: &SourceArgs) {
    if let Some(p) = &s.input {
        cfg.input = Some(p.clone());
        cfg.generate = None;
    }
    if let Some(g) = s.generate {
        cfg.generate = Some(g);
        cfg.input = None;
    }
    if let Some(seed) = s.seed {
        cfg.seed = seed;
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => PipelineConfig::from_toml_file(p)?,
        None => PipelineConfig::default(),
    };
    apply_source(&mut cfg, &args.source);
    if !args.measures.is_empty() {
        cfg.measures = args.measures;
    }
    if !args.q.is_empty() {
        cfg.q = args.q;
    }
    if args.labels.is_some() {
        cfg.labels = args.labels;
    }
    if args.outlier_labels.is_some() {
        cfg.outlier_labels = args.outlier_labels;
    }
    if let Some(m) = args.embed_dim {
        cfg.embed_dim = m;
    }
    if args.dbscan_eps.is_some() {
        cfg.dbscan.eps = args.dbscan_eps;
    }
    if let Some(m) = args.dbscan_minpts {
        cfg.dbscan.min_pts = m;
    }
    if args.ensemble_within.is_some() {
        cfg.ensemble_within = args.ensemble_within;
    }
    if args.ensemble_across.is_some() {
        cfg.ensemble_across = args.ensemble_across;
    }
    if let Some(o) = args.out {
        cfg.out = o;
    }
    let summary = run_pipeline(&cfg)?;
    for r in &summary.runs {
        let db = r.db_index.map_or("-".to_string(), |v| format!("{v:.6}"));
        println!(
            "{:<8} q={:<5} DB={:<10} dbscan clusters={} noise={}",
            r.measure, r.q, db, r.dbscan.n_clusters, r.dbscan.n_noise
        );
    }
    Ok(())
}

fn curves(args: CurvesArgs) -> Result<()> {
    let mut cfg = PipelineConfig::default();
    apply_source(&mut cfg, &args.source);
    let bundle = load_dataset(&cfg)?;
    let u = rank_transform(&bundle.scores);
    let k = u.n_cols();
    for idx in [args.i, args.j] {
        if idx >= k {
            return Err(Error::Config(format!(
                "column {idx} out of range for {k} columns"
            )));
        }
    }
    if args.i == args.j {
        return Err(Error::Config("i and j must differ".into()));
    }
    let grid: Vec<f64> = if args.q.is_empty() {
        (50..100).map(|p| p as f64 / 100.0).collect()
    } else {
        args.q
    };
    if let Some(q) = grid.iter().find(|&&q| !(q > 0.0 && q < 1.0)) {
        return Err(Error::Config(format!("q = {q} not in (0, 1)")));
    }
    let rows = emit_curves(&u, args.i, args.j, &grid)?;
    write_curves(&args.out, &rows)
}

fn generate(args: GenerateArgs) -> Result<()> {
    let cfg = PipelineConfig::default();
    let bundle = generate_bundle(args.generate, args.seed, &cfg.generators)?;
    write_bundle(&args.out, &bundle)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run(a) => run(a),
        Command::Curves(a) => curves(a),
        Command::Generate(a) => generate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
