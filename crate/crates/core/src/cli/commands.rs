//! The subcommands as library functions.
//!
//! Layout under the output root:
//!
//! ```text
//! data/corr-0.5.csv, data/manifest.csv          prepare
//! <name>/config.toml, trace.csv, final.ckpt,    train
//!        threshold.ckpt, metrics.json
//! <name>/cells/corr-0.5/<algorithm>/seed-0/...  sweep
//! <name>/cells/p-0.5/seed-0/...                 alpha-sweep
//! <name>/summary.csv                            sweep, alpha-sweep
//! ```

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::summary::{summarize, write_cell, write_summary, CellResult, CellStatus, SummaryRow};
use crate::dataset::{adult_like, augment, load_csv, make_synthetic, read_cache, split, write_cache, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{noise_weight_ratio, MetricReport};
use crate::models::{classify_soft, read_checkpoint, write_checkpoint, Checkpoint, FairnessMetric, ModelParams};
use crate::optim::{train, write_trace, Algorithm, AlphaSchedule};

pub const TRACE_FILE: &str = "trace.csv";
pub const FINAL_CHECKPOINT: &str = "final.ckpt";
pub const THRESHOLD_CHECKPOINT: &str = "threshold.ckpt";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.csv";

/// Seeds of the split and of the train/test noise columns for run seed `s`.
pub fn derived_seeds(s: u64) -> (u64, u64, u64) {
    let base = s.wrapping_mul(1000);
    (base, base.wrapping_add(1), base.wrapping_add(2))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Base population: the configured CSV, or a generated census-like sample.
pub fn base_dataset(config: &ExperimentConfig) -> Result<Dataset> {
    match &config.data.base {
        Some(path) => load_csv(path, &config.schema()),
        None => adult_like(config.data.base_samples, config.data.base_seed),
    }
}

pub fn cache_path(config: &ExperimentConfig, correlation: f64) -> PathBuf {
    config.cache_dir().join(format!("corr-{correlation}.csv"))
}

/// One line of the prepare manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedTarget {
    pub target: f64,
    pub path: PathBuf,
    pub correlation: Option<f64>,
    pub flips: Option<usize>,
    pub error: Option<String>,
}

/// Writes one relabeled cache per target correlation plus `manifest.csv`.
///
/// A target that cannot be reached gets an error entry; the remaining targets
/// are still produced.
pub fn cmd_prepare(config: &ExperimentConfig) -> Result<Vec<PreparedTarget>> {
    if config.data.correlations.is_empty() {
        return Err(Error::Config("prepare needs at least one target correlation".into()));
    }
    let base = base_dataset(config)?;
    let dir = config.cache_dir();
    create_dir(&dir)?;
    let mut out = Vec::new();
    for &target in &config.data.correlations {
        let path = cache_path(config, target);
        let entry = match make_synthetic(&base, target, config.data.label_seed) {
            Ok(s) => {
                write_cache(&s.dataset, &path)?;
                PreparedTarget {
                    target,
                    path,
                    correlation: Some(s.correlation),
                    flips: Some(s.flips),
                    error: None,
                }
            }
            Err(e) => PreparedTarget {
                target,
                path,
                correlation: None,
                flips: None,
                error: Some(e.to_string()),
            },
        };
        out.push(entry);
    }

    let manifest = dir.join(MANIFEST_FILE);
    let mut w = csv::Writer::from_path(&manifest)?;
    w.write_record(["target", "correlation", "flips", "file", "error"])?;
    for p in &out {
        let na = || "NA".to_string();
        w.write_record([
            p.target.to_string(),
            p.correlation.map_or_else(na, |c| c.to_string()),
            p.flips.map_or_else(na, |f| f.to_string()),
            p.path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(na),
            p.error.clone().unwrap_or_else(na),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&manifest, e))?;
    if out.iter().all(|p| p.error.is_some()) {
        return Err(Error::Dataset("no target correlation could be reached".into()));
    }
    Ok(out)
}

/// Dataset of one sweep point: the cached relabeling at `target` (created
/// if missing) or the base labels when `target` is `None`.
pub fn resolve_dataset(config: &ExperimentConfig, target: Option<f64>) -> Result<Dataset> {
    let Some(c) = target else {
        return base_dataset(config);
    };
    let path = cache_path(config, c);
    if path.exists() {
        return read_cache(&path);
    }
    let synthetic = make_synthetic(&base_dataset(config)?, c, config.data.label_seed)?;
    create_dir(&config.cache_dir())?;
    write_cache(&synthetic.dataset, &path)?;
    Ok(synthetic.dataset)
}

/// One training run.
#[derive(Debug, Clone)]
pub struct Cell {
    pub target: Option<f64>,
    pub algorithm: Algorithm,
    pub alpha: AlphaSchedule,
    pub seed: u64,
    pub dir: PathBuf,
}

/// Trains one cell and writes its files into `cell.dir`. Training failures
/// are recorded in the returned result and also handed back as the error.
pub fn run_cell(config: &ExperimentConfig, data: &Dataset, cell: &Cell) -> Result<(CellResult, Option<Error>)> {
    create_dir(&cell.dir)?;
    let model = config.model()?;
    let mut opt = config.optimizer(cell.algorithm, cell.alpha)?;
    opt.seed = cell.seed;
    let augmentation = config.augmentation()?;
    let metric_name = match model.adversary.metric() {
        FairnessMetric::StatisticalRate => "statistical_rate",
        FairnessMetric::FalseDiscoveryRate => "false_discovery_rate",
    };
    let mut result = CellResult {
        target_correlation: cell.target,
        measured_correlation: data.label_correlation().ok(),
        algorithm: cell.algorithm.name().into(),
        seed: cell.seed,
        alpha0: cell.alpha.alpha0,
        alpha_power: cell.alpha.power,
        status: CellStatus::Ok,
        error: None,
        iterations: 0,
        fairness_metric: metric_name.into(),
        threshold: opt.threshold,
        iterations_to_threshold: None,
        selected_iteration: None,
        below_threshold: false,
        train_final: None,
        test_final: None,
        test_selected: None,
        noise_weight_ratio: None,
    };

    let (split_seed, train_noise, test_noise) = derived_seeds(cell.seed);
    let outcome = split(data, config.data.test_fraction, split_seed).and_then(|(tr, te)| {
        let tr = augment(&tr, augmentation, train_noise);
        let te = augment(&te, augmentation, test_noise);
        let out = train(&opt, &model, &tr, None)?;
        Ok((tr, te, out))
    });

    let (tr, te, out) = match outcome {
        Ok(v) => v,
        Err(err) => {
            if let Error::Divergence { partial, .. } = &err {
                write_trace(partial, cell.dir.join(TRACE_FILE))?;
                result.iterations = partial.len();
                result.status = CellStatus::Diverged;
            } else {
                result.status = CellStatus::Failed;
            }
            result.error = Some(err.to_string());
            write_cell(&result, &cell.dir)?;
            return Ok((result, Some(err)));
        }
    };

    write_trace(&out.trace, cell.dir.join(TRACE_FILE))?;
    let checkpoint = |params: &ModelParams| Checkpoint {
        n: data.n_features(),
        model,
        augmentation,
        noise_seed: train_noise,
        params: params.clone(),
    };
    write_checkpoint(&checkpoint(&out.params), cell.dir.join(FINAL_CHECKPOINT))?;
    let selected = out.selected();
    let threshold_file = cell.dir.join(THRESHOLD_CHECKPOINT);
    if opt.threshold.is_some() && !selected.below_threshold {
        write_checkpoint(&checkpoint(&selected.snapshot.params), &threshold_file)?;
    } else if threshold_file.exists() {
        std::fs::remove_file(&threshold_file).map_err(|e| Error::io(&threshold_file, e))?;
    }

    let report = |w: &[f64], d: &crate::dataset::AugmentedDataset| MetricReport::compute(&classify_soft(w, d)?, d.base());
    result.iterations = out.trace.len();
    result.iterations_to_threshold = opt.threshold.and_then(|tau| out.trace.first_reaching(tau));
    result.selected_iteration = Some(selected.snapshot.iteration);
    result.below_threshold = selected.below_threshold;
    result.train_final = Some(report(&out.params.w, &tr)?);
    result.test_final = Some(report(&out.params.w, &te)?);
    result.test_selected = Some(report(&selected.snapshot.params.w, &te)?);
    let reported = if opt.threshold.is_some() { &selected.snapshot.params.w } else { &out.params.w };
    result.noise_weight_ratio = noise_weight_ratio(reported).ok().filter(|r| r.is_finite());
    write_cell(&result, &cell.dir)?;
    Ok((result, None))
}

fn prepare_experiment_dir(config: &ExperimentConfig) -> Result<PathBuf> {
    let dir = config.experiment_dir();
    create_dir(&dir)?;
    let path = dir.join("config.toml");
    std::fs::write(&path, config.to_toml()).map_err(|e| Error::io(&path, e))?;
    Ok(dir)
}

/// Single run with the first configured algorithm, correlation and seed.
/// Files go directly into the experiment directory.
pub fn cmd_train(config: &ExperimentConfig) -> Result<CellResult> {
    let target = config.data.correlations.first().copied();
    let data = resolve_dataset(config, target)?;
    let dir = prepare_experiment_dir(config)?;
    let cell = Cell {
        target,
        algorithm: config.algorithms()?[0],
        alpha: config.alpha(),
        seed: config.seeds[0],
        dir,
    };
    match run_cell(config, &data, &cell)? {
        (result, None) => Ok(result),
        (_, Some(err)) => Err(err),
    }
}

fn run_cells(config: &ExperimentConfig, cells: &[(Cell, &Dataset)]) -> Result<Vec<SummaryRow>> {
    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|(cell, data)| run_cell(config, data, cell).map(|(r, _)| r))
        .collect::<Result<_>>()?;
    let rows = summarize(&results);
    write_summary(&rows, config.experiment_dir().join(SUMMARY_FILE))?;
    Ok(rows)
}

/// Every (correlation, algorithm, seed) cell, run in parallel, then the
/// summary. Failed cells become error rows.
pub fn cmd_sweep(config: &ExperimentConfig) -> Result<Vec<SummaryRow>> {
    let dir = prepare_experiment_dir(config)?;
    let targets: Vec<Option<f64>> = if config.data.correlations.is_empty() {
        vec![None]
    } else {
        config.data.correlations.iter().copied().map(Some).collect()
    };
    let datasets = targets
        .iter()
        .map(|&t| resolve_dataset(config, t))
        .collect::<Result<Vec<_>>>()?;
    let algorithms = config.algorithms()?;
    let mut cells = Vec::new();
    for (target, data) in targets.iter().zip(&datasets) {
        let corr_dir = dir
            .join("cells")
            .join(target.map_or_else(|| "base".to_string(), |c| format!("corr-{c}")));
        for &algorithm in &algorithms {
            for &seed in &config.seeds {
                let cell = Cell {
                    target: *target,
                    algorithm,
                    alpha: config.alpha(),
                    seed,
                    dir: corr_dir.join(algorithm.name()).join(format!("seed-{seed}")),
                };
                cells.push((cell, data));
            }
        }
    }
    run_cells(config, &cells)
}

/// `α_t = α₀ t^-p` for every configured `p`, on the first correlation (or
/// the base labels) with the first algorithm.
pub fn cmd_alpha_sweep(config: &ExperimentConfig) -> Result<Vec<SummaryRow>> {
    if config.alpha_sweep.powers.is_empty() {
        return Err(Error::Config("alpha_sweep.powers is empty".into()));
    }
    let dir = prepare_experiment_dir(config)?;
    let target = config.data.correlations.first().copied();
    let data = resolve_dataset(config, target)?;
    let algorithm = config.algorithms()?[0];
    let mut cells = Vec::new();
    for &power in &config.alpha_sweep.powers {
        for &seed in &config.seeds {
            let cell = Cell {
                target,
                algorithm,
                alpha: AlphaSchedule {
                    alpha0: config.optim.alpha0,
                    power,
                },
                seed,
                dir: dir.join("cells").join(format!("p-{power}")).join(format!("seed-{seed}")),
            };
            cells.push((cell, &data));
        }
    }
    run_cells(config, &cells)
}

/// Metrics of a checkpoint on `data` (a dataset cache), or on the test split
/// of the configured dataset for the first seed when `data` is `None`.
pub fn cmd_evaluate(config: &ExperimentConfig, checkpoint: &Path, data: Option<&Path>) -> Result<MetricReport> {
    let ckpt = read_checkpoint(checkpoint)?;
    let (dataset, noise_seed) = match data {
        Some(path) => (read_cache(path)?, ckpt.noise_seed),
        None => {
            let full = resolve_dataset(config, config.data.correlations.first().copied())?;
            let (split_seed, _, test_noise) = derived_seeds(config.seeds[0]);
            (split(&full, config.data.test_fraction, split_seed)?.1, test_noise)
        }
    };
    if dataset.n_features() != ckpt.n {
        return Err(Error::Dimension {
            expected: ckpt.n,
            found: dataset.n_features(),
        });
    }
    let aug = augment(&dataset, ckpt.augmentation, noise_seed);
    MetricReport::compute(&classify_soft(&ckpt.params.w, &aug)?, &dataset)
}
