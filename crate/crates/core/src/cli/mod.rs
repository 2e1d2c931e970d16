//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 divergence.
//! The output root comes from `--output`, then `FAIRGDA_OUTPUT_ROOT`, then
//! the config file.

mod commands;
mod config;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use commands::{
    base_dataset, cache_path, cmd_alpha_sweep, cmd_evaluate, cmd_prepare, cmd_sweep, cmd_train, derived_seeds,
    resolve_dataset, run_cell, Cell, PreparedTarget, FINAL_CHECKPOINT, MANIFEST_FILE, SUMMARY_FILE,
    THRESHOLD_CHECKPOINT, TRACE_FILE,
};
pub use config::{parse_override, set_key, AlphaSweepConfig, DataConfig, ExperimentConfig, ModelConfig, OptimConfig};
pub use summary::{
    collect_cells, read_cell, read_summary, summarize, summarize_dir, summary_to_csv, write_cell, write_summary,
    CellResult, CellStatus, Stat, SummaryRow, CELL_FILE, SUMMARY_COLUMNS,
};

use crate::error::Error;

pub const OUTPUT_ROOT_ENV: &str = "FAIRGDA_OUTPUT_ROOT";

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_DIVERGENCE: u8 = 4;

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        Error::Divergence { .. } => EXIT_DIVERGENCE,
        _ => EXIT_DATA,
    }
}

#[derive(Debug, Parser)]
#[command(name = "fairgda", version, about = "Adversarially fair logistic classifiers")]
pub struct Cli {
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. `--set optim.iterations=50`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output root.
    #[arg(long, global = true, env = OUTPUT_ROOT_ENV)]
    pub output: Option<PathBuf>,
    /// Experiment name (subdirectory of the output root).
    #[arg(long, global = true)]
    pub name: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write relabeled dataset caches for the target correlations.
    Prepare {
        #[arg(long, value_delimiter = ',')]
        correlations: Option<Vec<f64>>,
    },
    /// Train one model.
    Train {
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long)]
        correlation: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Train every correlation and algorithm combination and summarize.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        correlations: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Train with `α_t = α₀ t^-p` over a list of powers `p`.
    AlphaSweep {
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long)]
        correlation: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        powers: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Print the test metrics of a checkpoint as JSON.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Dataset cache to evaluate on; defaults to the configured test split.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

fn floats(v: &[f64]) -> toml::Value {
    toml::Value::Array(v.iter().map(|&x| toml::Value::Float(x)).collect())
}

impl Cli {
    /// `--set` pairs followed by the dedicated flags, which take precedence.
    pub fn overrides(&self) -> crate::Result<Vec<(String, toml::Value)>> {
        let mut o: Vec<(String, toml::Value)> = self.set.iter().map(|s| parse_override(s)).collect::<crate::Result<_>>()?;
        let mut put = |k: &str, v: toml::Value| o.push((k.to_string(), v));
        use toml::Value as V;
        if let Some(p) = &self.output {
            put("output", V::String(p.to_string_lossy().into_owned()));
        }
        if let Some(n) = &self.name {
            put("name", V::String(n.clone()));
        }
        let strings = |v: &[String]| V::Array(v.iter().cloned().map(V::String).collect());
        let seeds = |v: &[u64]| V::Array(v.iter().map(|&s| V::Integer(s as i64)).collect());
        match &self.command {
            Command::Prepare { correlations } => {
                if let Some(c) = correlations {
                    put("data.correlations", floats(c));
                }
            }
            Command::Train {
                algorithm,
                correlation,
                seed,
                iterations,
                threshold,
            } => {
                if let Some(a) = algorithm {
                    put("optim.algorithms", strings(std::slice::from_ref(a)));
                }
                if let Some(c) = correlation {
                    put("data.correlations", floats(&[*c]));
                }
                if let Some(s) = seed {
                    put("seeds", seeds(&[*s]));
                }
                if let Some(t) = iterations {
                    put("optim.iterations", V::Integer(*t as i64));
                }
                if let Some(t) = threshold {
                    put("optim.threshold", V::Float(*t));
                }
            }
            Command::Sweep {
                correlations,
                algorithms,
                seeds: s,
            } => {
                if let Some(c) = correlations {
                    put("data.correlations", floats(c));
                }
                if let Some(a) = algorithms {
                    put("optim.algorithms", strings(a));
                }
                if let Some(s) = s {
                    put("seeds", seeds(s));
                }
            }
            Command::AlphaSweep {
                algorithm,
                correlation,
                powers,
                seeds: s,
            } => {
                if let Some(a) = algorithm {
                    put("optim.algorithms", strings(std::slice::from_ref(a)));
                }
                if let Some(c) = correlation {
                    put("data.correlations", floats(&[*c]));
                }
                if let Some(p) = powers {
                    put("alpha_sweep.powers", floats(p));
                }
                if let Some(s) = s {
                    put("seeds", seeds(s));
                }
            }
            Command::Evaluate { .. } => {}
        }
        Ok(o)
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_rows(rows: &[SummaryRow]) -> crate::Result<()> {
    emit(&summary_to_csv(rows)?);
    Ok(())
}

fn execute(cli: &Cli) -> crate::Result<()> {
    let config = ExperimentConfig::load(cli.config.as_deref(), &cli.overrides()?)?;
    match &cli.command {
        Command::Prepare { .. } => {
            for p in cmd_prepare(&config)? {
                match (&p.error, p.correlation) {
                    (None, Some(c)) => emit(&format!("{}\t{c:.4}\t{}\n", p.target, p.path.display())),
                    (err, _) => eprintln!("{}\terror: {}", p.target, err.as_deref().unwrap_or("unknown")),
                }
            }
        }
        Command::Train { .. } => {
            let r = cmd_train(&config)?;
            let test = r.reported_test().expect("finished run has test metrics");
            emit(&format!(
                "{}: {} iterations, test accuracy {:.4}, test {} {}\n",
                config.experiment_dir().display(),
                r.iterations,
                test.accuracy,
                r.fairness_metric,
                r.test_fairness().map_or_else(|| "NA".into(), |f| format!("{f:.4}")),
            ));
        }
        Command::Sweep { .. } => print_rows(&cmd_sweep(&config)?)?,
        Command::AlphaSweep { .. } => print_rows(&cmd_alpha_sweep(&config)?)?,
        Command::Evaluate { checkpoint, data } => {
            let report = cmd_evaluate(&config, checkpoint, data.as_deref())?;
            emit(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"));
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
