//! End-to-end pipeline: scores, similarity matrices, spectral embedding,
//! Davies-Bouldin index, DBSCAN and ensembles, written as CSV and JSON.

pub mod io;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clustering::{
    davies_bouldin_points, dbscan_cluster, spectral_embed, DbscanResult, SpectralEmbedding, Spread,
    DEFAULT_MIN_PTS,
};
use crate::datagen::{
    gen_block, gen_mixture, gen_t_ensemble, gen_two_anom, BlockConfig, DatasetBundle, Generator,
    MixtureConfig, TEnsembleConfig, TwoAnomConfig,
};
use crate::empirical::{rank_transform, PseudoMatrix, QuadrantLevel};
use crate::ensemble::{auc_roc, combine_scores, Across, EnsembleSpec, Within};
use crate::error::{Error, Result};
use crate::estimators::{chi_bar_hat, chi_hat, fit_pair, ucorr};
use crate::similarity::{build_similarity_pseudo, Measure, SimilarityMatrix};
use io::{fmt_num, CsvOut};

fn default_measures() -> Vec<Measure> {
    vec![
        Measure::ThetaA,
        Measure::UCorr,
        Measure::ChiBar,
        Measure::Chi,
    ]
}

fn default_q() -> Vec<f64> {
    vec![0.75]
}

fn default_embed_dim() -> usize {
    1
}

fn default_min_pts() -> usize {
    DEFAULT_MIN_PTS
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbscanConfig {
    /// `None` picks eps from the largest gap in the k-distances.
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "default_min_pts")]
    pub min_pts: usize,
}

impl Default for DbscanConfig {
    fn default() -> Self {
        Self {
            eps: None,
            min_pts: DEFAULT_MIN_PTS,
        }
    }
}

/// Generator settings; only the section of the selected generator is used.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfigs {
    pub block: BlockConfig,
    pub mixture: MixtureConfig,
    pub two_anom: TwoAnomConfig,
    pub t_ensemble: TEnsembleConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub generate: Option<Generator>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_measures")]
    pub measures: Vec<Measure>,
    #[serde(default = "default_q")]
    pub q: Vec<f64>,
    #[serde(default = "default_embed_dim")]
    pub embed_dim: usize,
    #[serde(default)]
    pub labels: Option<PathBuf>,
    #[serde(default)]
    pub outlier_labels: Option<PathBuf>,
    #[serde(default)]
    pub dbscan: DbscanConfig,
    /// `None` runs every operator.
    #[serde(default)]
    pub ensemble_within: Option<Within>,
    #[serde(default)]
    pub ensemble_across: Option<Across>,
    #[serde(default)]
    pub db_spread: Spread,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub generators: GeneratorConfigs,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: None,
            generate: None,
            seed: 0,
            measures: default_measures(),
            q: default_q(),
            embed_dim: default_embed_dim(),
            labels: None,
            outlier_labels: None,
            dbscan: DbscanConfig::default(),
            ensemble_within: None,
            ensemble_across: None,
            db_spread: Spread::default(),
            out: default_out(),
            generators: GeneratorConfigs::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.input, &self.generate) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either input or generate, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config("one of input or generate is required".into()))
            }
            _ => {}
        }
        if self.measures.is_empty() {
            return Err(Error::Config("at least one measure is required".into()));
        }
        if self.q.is_empty() {
            return Err(Error::Config("at least one q is required".into()));
        }
        for &q in &self.q {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::Config(format!("q = {q} not in (0, 1)")));
            }
        }
        if self.embed_dim == 0 {
            return Err(Error::Config("embed_dim must be at least 1".into()));
        }
        if self.dbscan.min_pts == 0 || self.dbscan.eps.is_some_and(|e| e.is_nan() || e <= 0.0) {
            return Err(Error::Config(
                "dbscan needs eps > 0 and min_pts >= 1".into(),
            ));
        }
        Ok(())
    }

    fn within_ops(&self) -> Vec<Within> {
        self.ensemble_within
            .map_or(Within::ALL.to_vec(), |w| vec![w])
    }

    fn across_ops(&self) -> Vec<Across> {
        self.ensemble_across
            .map_or(Across::ALL.to_vec(), |a| vec![a])
    }

    fn dataset_name(&self) -> String {
        match (&self.generate, &self.input) {
            (Some(g), _) => g.name().to_string(),
            (_, Some(p)) => p
                .file_stem()
                .map_or("input".into(), |s| s.to_string_lossy().into_owned()),
            _ => "input".into(),
        }
    }
}

/// Generate a bundle with the settings in `cfg`.
pub fn generate_bundle(g: Generator, seed: u64, cfg: &GeneratorConfigs) -> Result<DatasetBundle> {
    match g {
        Generator::Block => gen_block(&cfg.block, seed),
        Generator::Mixture => gen_mixture(&cfg.mixture, seed),
        Generator::TwoAnom => gen_two_anom(&cfg.two_anom, seed),
        Generator::TEnsemble => gen_t_ensemble(&cfg.t_ensemble, seed),
    }
}

/// Load scores and any labels named by the config.
pub fn load_dataset(cfg: &PipelineConfig) -> Result<DatasetBundle> {
    let mut bundle = match (&cfg.generate, &cfg.input) {
        (Some(g), _) => generate_bundle(*g, cfg.seed, &cfg.generators)?,
        (None, Some(p)) => {
            let scores = io::read_scores(p)?;
            DatasetBundle {
                detector_cluster_labels: Vec::new(),
                outlier_labels: None,
                scores,
            }
        }
        (None, None) => return Err(Error::Config("no input".into())),
    };
    if let Some(p) = &cfg.labels {
        bundle.detector_cluster_labels = io::read_cluster_labels(p)?;
    }
    if let Some(p) = &cfg.outlier_labels {
        bundle.outlier_labels = Some(io::read_outlier_labels(p)?);
    }
    let k = bundle.scores.n_cols();
    let n = bundle.scores.n_rows();
    let labels = &bundle.detector_cluster_labels;
    if !labels.is_empty() && labels.len() != k {
        return Err(Error::Data {
            path: cfg
                .labels
                .as_ref()
                .map_or(String::new(), |p| p.display().to_string()),
            line: 0,
            msg: format!("{} labels for {k} detectors", labels.len()),
        });
    }
    if let Some(o) = &bundle.outlier_labels {
        if o.len() != n {
            return Err(Error::Data {
                path: cfg
                    .outlier_labels
                    .as_ref()
                    .map_or(String::new(), |p| p.display().to_string()),
                line: 0,
                msg: format!("{} outlier labels for {n} rows", o.len()),
            });
        }
    }
    Ok(bundle)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DbscanSummary {
    pub eps: f64,
    pub min_pts: usize,
    pub n_clusters: usize,
    pub n_noise: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub measure: Measure,
    pub q: f64,
    pub db_index: Option<f64>,
    pub db_error: Option<String>,
    pub eigenvalues: Vec<f64>,
    pub failed_pairs: usize,
    pub dbscan: DbscanSummary,
    /// Keyed `within/across`.
    pub auc: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSummary {
    pub dataset: String,
    pub seed: u64,
    pub n_rows: usize,
    pub n_detectors: usize,
    pub runs: Vec<RunSummary>,
}

impl PipelineSummary {
    pub fn run(&self, measure: Measure, q: f64) -> Option<&RunSummary> {
        self.runs.iter().find(|r| r.measure == measure && r.q == q)
    }
}

fn tag(measure: Measure, q: f64) -> String {
    format!("{}_q{}", measure.name(), q)
}

/// Davies-Bouldin index of the embedding, over detectors with a reference label.
pub fn embedding_db_index(
    e: &SpectralEmbedding,
    labels: &[Option<usize>],
    spread: Spread,
) -> Result<f64> {
    let rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_some()).collect();
    let pts = e.coordinates.select_rows(rows.iter());
    let lab: Vec<usize> = rows.iter().map(|&i| labels[i].unwrap()).collect();
    Ok(davies_bouldin_points(&pts, &lab, spread)?.db_index)
}

/// One measure at one q: all artifacts for it plus its summary line.
pub struct MeasureRun {
    pub similarity: SimilarityMatrix,
    pub embedding: SpectralEmbedding,
    pub dbscan: DbscanResult,
    /// `(within, across, scores)`.
    pub ensembles: Vec<(Within, Across, Vec<f64>)>,
    pub summary: RunSummary,
}

pub fn run_measure(
    u: &PseudoMatrix,
    bundle: &DatasetBundle,
    measure: Measure,
    q: QuadrantLevel,
    cfg: &PipelineConfig,
) -> Result<MeasureRun> {
    let similarity = build_similarity_pseudo(u, measure, q);
    for f in similarity.failures() {
        log::warn!(
            "{} q={}: pair ({}, {}) set to floor: {}",
            measure,
            q.value(),
            f.i,
            f.j,
            f.error.as_deref().unwrap_or("")
        );
    }
    let embedding = spectral_embed(&similarity, cfg.embed_dim)?;
    let (db_index, db_error) = if bundle.detector_cluster_labels.is_empty() {
        (None, None)
    } else {
        match embedding_db_index(&embedding, &bundle.detector_cluster_labels, cfg.db_spread) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let dbscan = dbscan_cluster(&similarity, cfg.dbscan.eps, cfg.dbscan.min_pts)?;

    let mut ensembles = Vec::new();
    let mut auc = BTreeMap::new();
    if let Some(outliers) = &bundle.outlier_labels {
        for within in cfg.within_ops() {
            for across in cfg.across_ops() {
                let spec = EnsembleSpec::new(within, across, dbscan.labels.clone());
                match combine_scores(u, &spec) {
                    Ok(s) => {
                        auc.insert(format!("{within}/{across}"), auc_roc(&s, outliers)?.auc);
                        ensembles.push((within, across, s));
                    }
                    Err(e) => log::warn!(
                        "{} q={}: ensemble {within}/{across}: {e}",
                        measure,
                        q.value()
                    ),
                }
            }
        }
    }
    let summary = RunSummary {
        measure,
        q: q.value(),
        db_index,
        db_error,
        eigenvalues: embedding.eigenvalues.clone(),
        failed_pairs: similarity.failures().count(),
        dbscan: DbscanSummary {
            eps: dbscan.eps,
            min_pts: dbscan.min_pts,
            n_clusters: dbscan.n_clusters(),
            n_noise: dbscan.n_noise(),
        },
        auc,
    };
    Ok(MeasureRun {
        similarity,
        embedding,
        dbscan,
        ensembles,
        summary,
    })
}

fn write_measure_run(dir: &Path, run: &MeasureRun, outliers: Option<&[bool]>) -> Result<()> {
    let t = tag(run.summary.measure, run.summary.q);
    let names = &run.similarity.names;

    let mut out = CsvOut::create(&dir.join(format!("similarity_{t}.csv")))?;
    out.row(std::iter::once("").chain(names.iter().map(String::as_str)))?;
    for (i, name) in names.iter().enumerate() {
        let vals = run
            .similarity
            .values
            .row(i)
            .iter()
            .map(|&v| fmt_num(v))
            .collect::<Vec<_>>();
        out.row(std::iter::once(name.clone()).chain(vals))?;
    }
    out.finish()?;

    let mut out = CsvOut::create(&dir.join(format!("embedding_{t}.csv")))?;
    let m = run.embedding.dim();
    out.row(std::iter::once("detector".to_string()).chain((1..=m).map(|c| format!("v{}", c + 1))))?;
    for (i, name) in names.iter().enumerate() {
        let vals = (0..m).map(|c| fmt_num(run.embedding.coordinates[(i, c)]));
        out.row(std::iter::once(name.clone()).chain(vals))?;
    }
    out.finish()?;

    let mut out = CsvOut::create(&dir.join(format!("dbscan_{t}.csv")))?;
    out.row(["detector", "cluster"])?;
    for (name, l) in names.iter().zip(&run.dbscan.labels) {
        out.row([name.clone(), l.map_or("-1".into(), |c| c.to_string())])?;
    }
    out.finish()?;

    if let Some(outliers) = outliers {
        if !run.ensembles.is_empty() {
            let mut out = CsvOut::create(&dir.join(format!("ensemble_{t}.csv")))?;
            let header = std::iter::once("row".to_string())
                .chain(std::iter::once("outlier".to_string()))
                .chain(run.ensembles.iter().map(|(w, a, _)| format!("{w}/{a}")));
            out.row(header)?;
            for (r, &o) in outliers.iter().enumerate() {
                let vals = run.ensembles.iter().map(|(_, _, s)| fmt_num(s[r]));
                out.row(
                    [r.to_string(), (o as u8).to_string()]
                        .into_iter()
                        .chain(vals),
                )?;
            }
            out.finish()?;

            let mut out = CsvOut::create(&dir.join(format!("roc_{t}.csv")))?;
            out.row(["ensemble", "fpr", "tpr"])?;
            for (w, a, s) in &run.ensembles {
                let roc = auc_roc(s, outliers)?;
                for (fpr, tpr) in roc.curve {
                    out.row([format!("{w}/{a}"), fmt_num(fpr), fmt_num(tpr)])?;
                }
            }
            out.finish()?;
        }
    }
    Ok(())
}

fn write_summary(dir: &Path, cfg: &PipelineConfig, s: &PipelineSummary) -> Result<()> {
    let json = serde_json::to_string_pretty(s).map_err(|e| Error::Numerical(e.to_string()))?;
    std::fs::write(dir.join("summary.json"), json + "\n")?;

    // One row per q, one DB column per measure.
    let mut out = CsvOut::create(&dir.join("summary.csv"))?;
    out.row(
        ["dataset".to_string(), "q".to_string()]
            .into_iter()
            .chain(cfg.measures.iter().map(|m| m.name().to_string())),
    )?;
    for &q in &cfg.q {
        let cells = cfg.measures.iter().map(|&m| {
            s.run(m, q)
                .and_then(|r| r.db_index)
                .map_or(String::new(), fmt_num)
        });
        out.row([s.dataset.clone(), q.to_string()].into_iter().chain(cells))?;
    }
    out.finish()
}

/// Run every configured measure and q, write all artifacts under `cfg.out`
/// and return the summary.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    let bundle = load_dataset(cfg)?;
    let u = rank_transform(&bundle.scores);
    std::fs::create_dir_all(&cfg.out)?;

    let mut runs = Vec::new();
    for &qv in &cfg.q {
        let q = QuadrantLevel::new(qv).map_err(|e| Error::Config(e.to_string()))?;
        for &m in &cfg.measures {
            log::info!("{} q={}", m, qv);
            let run = run_measure(&u, &bundle, m, q, cfg)?;
            write_measure_run(&cfg.out, &run, bundle.outlier_labels.as_deref())?;
            runs.push(run.summary);
        }
    }
    let summary = PipelineSummary {
        dataset: cfg.dataset_name(),
        seed: cfg.seed,
        n_rows: bundle.scores.n_rows(),
        n_detectors: bundle.scores.n_cols(),
        runs,
    };
    write_summary(&cfg.out, cfg, &summary)?;
    Ok(summary)
}

/// All six quantities of one pair at one q; `None` where a quantity fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub q: f64,
    pub theta_s: Option<f64>,
    pub theta_f: Option<f64>,
    pub theta_a: Option<f64>,
    pub chi: Option<f64>,
    pub chi_bar: Option<f64>,
    pub ucorr: Option<f64>,
}

pub fn emit_curves(u: &PseudoMatrix, i: usize, j: usize, q_grid: &[f64]) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::with_capacity(q_grid.len());
    for &qv in q_grid {
        let q = QuadrantLevel::new(qv)?;
        let fit = fit_pair(u, i, j, q).ok();
        rows.push(CurveRow {
            q: qv,
            theta_s: fit.map(|f| f.theta_s.value()),
            theta_f: fit.map(|f| f.theta_f.value()),
            theta_a: fit.map(|f| f.theta_a.value()),
            chi: chi_hat(u, i, j, q).ok(),
            chi_bar: chi_bar_hat(u, i, j, q).ok().map(|c| c.value),
            ucorr: ucorr(u, i, j, q).ok(),
        });
    }
    Ok(rows)
}

pub fn write_curves(path: &Path, rows: &[CurveRow]) -> Result<()> {
    let mut out = CsvOut::create(path)?;
    out.row([
        "q", "theta_s", "theta_f", "theta_a", "chi", "chi_bar", "ucorr",
    ])?;
    let cell = |v: Option<f64>| v.map_or(String::new(), fmt_num);
    for r in rows {
        out.row([
            fmt_num(r.q),
            cell(r.theta_s),
            cell(r.theta_f),
            cell(r.theta_a),
            cell(r.chi),
            cell(r.chi_bar),
            cell(r.ucorr),
        ])?;
    }
    out.finish()
}

/// Write a bundle as `scores.csv` plus `labels.csv` / `outliers.csv` sidecars.
pub fn write_bundle(dir: &Path, b: &DatasetBundle) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    io::write_scores(&dir.join("scores.csv"), &b.scores)?;
    io::write_cluster_labels(
        &dir.join("labels.csv"),
        "cluster",
        &b.detector_cluster_labels,
    )?;
    if let Some(o) = &b.outlier_labels {
        io::write_outlier_labels(&dir.join("outliers.csv"), o)?;
    }
    Ok(())
}
