//! Per-cell results and the sweep summary table.
//!
//! Every cell directory holds a `metrics.json` with a [`CellResult`]. The
//! summary is recomputed from those files alone, so a sweep directory can be
//! re-summarized offline with [`summarize_dir`].
//!
//! Summary columns (undefined values are written as `NA`):
//!
//! | column | meaning |
//! |---|---|
//! | `correlation` | requested label/sensitive correlation (`NA` for base labels) |
//! | `measured_correlation` | correlation measured on the dataset |
//! | `algorithm` | optimizer name |
//! | `alpha_power` | exponent `p` of `α_t = α₀ t^-p` |
//! | `runs`, `failures` | seeds in the cell and how many did not finish |
//! | `test_accuracy_*`, `test_fairness_*` | mean/min/max over finished seeds |
//! | `noise_weight_ratio_*` | mean/min/max of the trailing-weight ratio |
//! | `iterations_to_threshold` | mean first iteration with train fairness ≥ τ |
//! | `error` | first failure message, if any |

use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Diverged,
    Failed,
}

/// Contents of a cell's `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub target_correlation: Option<f64>,
    pub measured_correlation: Option<f64>,
    pub algorithm: String,
    pub seed: u64,
    pub alpha0: f64,
    pub alpha_power: f64,
    pub status: CellStatus,
    pub error: Option<String>,
    /// Recorded iterations (fewer than configured after a divergence).
    pub iterations: usize,
    pub fairness_metric: String,
    pub threshold: Option<f64>,
    pub iterations_to_threshold: Option<usize>,
    pub selected_iteration: Option<usize>,
    pub below_threshold: bool,
    pub train_final: Option<MetricReport>,
    pub test_final: Option<MetricReport>,
    /// Test metrics of the threshold-selected iterate.
    pub test_selected: Option<MetricReport>,
    /// Of the reported parameters.
    pub noise_weight_ratio: Option<f64>,
}

impl CellResult {
    /// Test report of the reported parameters: the threshold-selected iterate
    /// when a threshold is configured, the final iterate otherwise.
    pub fn reported_test(&self) -> Option<&MetricReport> {
        if self.threshold.is_some() {
            self.test_selected.as_ref()
        } else {
            self.test_final.as_ref()
        }
    }

    pub fn test_fairness(&self) -> Option<f64> {
        let r = self.reported_test()?;
        match self.fairness_metric.as_str() {
            "false_discovery_rate" => r.false_discovery_rate,
            _ => Some(r.statistical_rate),
        }
    }
}

/// Mean, min and max of the defined values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Stat {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return Stat::default();
        }
        Stat {
            mean: Some(v.iter().sum::<f64>() / v.len() as f64),
            min: v.iter().copied().reduce(f64::min),
            max: v.iter().copied().reduce(f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub correlation: Option<f64>,
    pub measured_correlation: Option<f64>,
    pub algorithm: String,
    pub alpha_power: f64,
    pub runs: usize,
    pub failures: usize,
    pub test_accuracy: Stat,
    pub test_fairness: Stat,
    pub noise_weight_ratio: Stat,
    pub iterations_to_threshold: Option<f64>,
    pub error: Option<String>,
}

pub const SUMMARY_COLUMNS: [&str; 18] = [
    "correlation",
    "measured_correlation",
    "algorithm",
    "alpha_power",
    "runs",
    "failures",
    "test_accuracy_mean",
    "test_accuracy_min",
    "test_accuracy_max",
    "test_fairness_mean",
    "test_fairness_min",
    "test_fairness_max",
    "noise_weight_ratio_mean",
    "noise_weight_ratio_min",
    "noise_weight_ratio_max",
    "iterations_to_threshold",
    "error",
    "status",
];

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
    }
}

/// Groups cells by `(correlation, algorithm, alpha_power)` and aggregates
/// over seeds. Rows come out sorted by that key.
pub fn summarize(cells: &[CellResult]) -> Vec<SummaryRow> {
    let mut cells: Vec<&CellResult> = cells.iter().collect();
    let key_cmp = |a: &CellResult, b: &CellResult| {
        cmp_opt(a.target_correlation, b.target_correlation)
            .then_with(|| a.algorithm.cmp(&b.algorithm))
            .then_with(|| a.alpha_power.total_cmp(&b.alpha_power))
    };
    cells.sort_by(|a, b| key_cmp(a, b).then_with(|| a.seed.cmp(&b.seed)));

    let mut rows = Vec::new();
    for group in cells.chunk_by(|a, b| key_cmp(a, b) == Ordering::Equal) {
        let head = group[0];
        let done: Vec<&CellResult> = group.iter().copied().filter(|c| c.status == CellStatus::Ok).collect();
        let its: Vec<f64> = done.iter().filter_map(|c| c.iterations_to_threshold).map(|t| t as f64).collect();
        rows.push(SummaryRow {
            correlation: head.target_correlation,
            measured_correlation: head.measured_correlation,
            algorithm: head.algorithm.clone(),
            alpha_power: head.alpha_power,
            runs: group.len(),
            failures: group.len() - done.len(),
            test_accuracy: Stat::of(done.iter().filter_map(|c| c.reported_test()).map(|r| r.accuracy)),
            test_fairness: Stat::of(done.iter().filter_map(|c| c.test_fairness())),
            noise_weight_ratio: Stat::of(done.iter().filter_map(|c| c.noise_weight_ratio)),
            iterations_to_threshold: Stat::of(its).mean,
            error: group.iter().find_map(|c| c.error.clone()),
        });
    }
    rows
}

impl SummaryRow {
    /// `ok`, `partial` (some seeds failed) or `error` (all failed).
    pub fn status(&self) -> &'static str {
        match self.failures {
            0 => "ok",
            f if f == self.runs => "error",
            _ => "partial",
        }
    }
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        let s = |st: &Stat| [fmt(st.mean), fmt(st.min), fmt(st.max)];
        let mut rec = vec![
            fmt(r.correlation),
            fmt(r.measured_correlation),
            r.algorithm.clone(),
            r.alpha_power.to_string(),
            r.runs.to_string(),
            r.failures.to_string(),
        ];
        rec.extend(s(&r.test_accuracy));
        rec.extend(s(&r.test_fairness));
        rec.extend(s(&r.noise_weight_ratio));
        rec.push(fmt(r.iterations_to_threshold));
        rec.push(r.error.clone().unwrap_or_else(|| "NA".into()));
        rec.push(r.status().into());
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io("summary", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_summary(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, summary_to_csv(rows)?).map_err(|e| Error::io(path, e))
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let path = path.as_ref();
    let bad = |message: String| Error::Format {
        kind: "summary",
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path)?;
    if reader.headers()?.iter().ne(SUMMARY_COLUMNS) {
        return Err(bad("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let opt = |k: usize| -> Result<Option<f64>> {
            match &rec[k] {
                "NA" => Ok(None),
                v => v
                    .parse()
                    .map(Some)
                    .map_err(|_| bad(format!("line {}: bad number `{v}`", line + 2))),
            }
        };
        let int = |k: usize| -> Result<usize> {
            rec[k].parse().map_err(|_| bad(format!("line {}: bad count `{}`", line + 2, &rec[k])))
        };
        let stat = |k: usize| -> Result<Stat> {
            Ok(Stat {
                mean: opt(k)?,
                min: opt(k + 1)?,
                max: opt(k + 2)?,
            })
        };
        rows.push(SummaryRow {
            correlation: opt(0)?,
            measured_correlation: opt(1)?,
            algorithm: rec[2].to_string(),
            alpha_power: opt(3)?.ok_or_else(|| bad("missing alpha_power".into()))?,
            runs: int(4)?,
            failures: int(5)?,
            test_accuracy: stat(6)?,
            test_fairness: stat(9)?,
            noise_weight_ratio: stat(12)?,
            iterations_to_threshold: opt(15)?,
            error: (&rec[16] != "NA").then(|| rec[16].to_string()),
        });
    }
    Ok(rows)
}

pub const CELL_FILE: &str = "metrics.json";

pub fn write_cell(cell: &CellResult, dir: impl AsRef<Path>) -> Result<()> {
    let path = dir.as_ref().join(CELL_FILE);
    let text = serde_json::to_string_pretty(cell).expect("cell result serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_cell(path: impl AsRef<Path>) -> Result<CellResult> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        kind: "cell metrics",
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn find_cells(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            find_cells(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == CELL_FILE) {
            out.push(path);
        }
    }
    Ok(())
}

/// Reads every `metrics.json` below `dir`, in path order.
pub fn collect_cells(dir: impl AsRef<Path>) -> Result<Vec<CellResult>> {
    let mut paths = Vec::new();
    find_cells(dir.as_ref(), &mut paths)?;
    paths.sort();
    paths.iter().map(read_cell).collect()
}

/// Summary of all cells below `dir`.
pub fn summarize_dir(dir: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    Ok(summarize(&collect_cells(dir)?))
}
