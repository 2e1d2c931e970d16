//! Test metrics as the decay power of the fairness weight varies.

use fairgda::cli::{cmd_alpha_sweep, parse_override, ExperimentConfig};

fn main() -> fairgda::Result<()> {
    let root = std::env::temp_dir().join("fairgda-alpha-sweep");
    let pairs = [
        format!("output=\"{}\"", root.display()),
        "name=\"alpha\"".to_string(),
        "data.base_samples=6000".to_string(),
        "data.correlations=[0.21]".to_string(),
        "model.mu=1.2e-7".to_string(),
        "model.ridge=1e-3".to_string(),
        "optim.algorithms=[\"ngd_modified\"]".to_string(),
        "optim.eta_adversary=1.0".to_string(),
        "optim.eta_classifier=1.0".to_string(),
    ];
    let overrides = pairs.iter().map(|p| parse_override(p)).collect::<fairgda::Result<Vec<_>>>()?;
    let config = ExperimentConfig::load(None, &overrides)?;
    println!("p    test acc  test SR  status");
    for row in cmd_alpha_sweep(&config)? {
        let f = |v: Option<f64>| v.map_or("NA".to_string(), |x| format!("{x:.3}"));
        println!("{:<4} {}     {}    {}", row.alpha_power, f(row.test_accuracy.mean), f(row.test_fairness.mean), row.status());
    }
    Ok(())
}
