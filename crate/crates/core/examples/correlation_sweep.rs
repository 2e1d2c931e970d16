//! Sweep over correlations with a noise column in place of the bias, written
//! to a temporary output root through the CLI layer.

use fairgda::cli::{cmd_sweep, parse_override, ExperimentConfig};

fn main() -> fairgda::Result<()> {
    let root = std::env::temp_dir().join("fairgda-correlation-sweep");
    let pairs = [
        format!("output=\"{}\"", root.display()),
        "name=\"noise\"".to_string(),
        "seeds=[0, 1]".to_string(),
        "data.base_samples=4000".to_string(),
        "data.correlations=[0.3, 0.5, 0.7, 0.9]".to_string(),
        "data.augmentation=\"noise\"".to_string(),
        "model.mu=1e-6".to_string(),
        "model.ridge=1e-3".to_string(),
        "optim.algorithms=[\"normal_gda\", \"ngd_modified\"]".to_string(),
        "optim.eta_adversary=1.0".to_string(),
        "optim.eta_classifier=1.0".to_string(),
        "optim.threshold=0.8".to_string(),
    ];
    let overrides = pairs.iter().map(|p| parse_override(p)).collect::<fairgda::Result<Vec<_>>>()?;
    let config = ExperimentConfig::load(None, &overrides)?;
    println!("corr  algorithm     acc    SR     noise ratio");
    for row in cmd_sweep(&config)? {
        let f = |v: Option<f64>| v.map_or("NA".to_string(), |x| format!("{x:.3}"));
        println!(
            "{:<5} {:<13} {}  {}  {}",
            f(row.correlation),
            row.algorithm,
            f(row.test_accuracy.mean),
            f(row.test_fairness.mean),
            f(row.noise_weight_ratio.mean)
        );
    }
    println!("cells and summary.csv under {}", config.experiment_dir().display());
    Ok(())
}
