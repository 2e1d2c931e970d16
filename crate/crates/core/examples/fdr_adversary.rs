//! Training against the false-discovery adversary.
//!
//! The FDR ratio is undefined when a group receives no positive predictions.

use fairgda::dataset::{adult_like, augment, make_synthetic, split, Augmentation};
use fairgda::metrics::MetricReport;
use fairgda::models::{classify_soft, Adversary, Model};
use fairgda::optim::{train, Algorithm, OptimizerConfig};

fn main() -> fairgda::Result<()> {
    let (tr, te) = split(&make_synthetic(&adult_like(5000, 0)?, 0.5, 1)?.dataset, 0.3, 2)?;
    let (tr, te) = (augment(&tr, Augmentation::Bias, 0), augment(&te, Augmentation::Bias, 0));
    let n = tr.len() as f64;
    for (name, mu) in [("no penalty", 0.0), ("penalized", 10.0 / n.powi(4))] {
        let model = Model::new(Adversary::FalseDiscovery { mu }, 1e-3);
        let config = OptimizerConfig {
            algorithm: Algorithm::NgdModified,
            eta_adversary: 1.0,
            eta_classifier: 1.0,
            ..Default::default()
        };
        let out = train(&config, &model, &tr, None)?;
        let r = MetricReport::compute(&classify_soft(&out.params.w, &te)?, te.base())?;
        let fdr = r.false_discovery_rate.map_or("undefined".to_string(), |f| format!("{f:.3}"));
        println!(
            "{name:<11} test accuracy {:.3}  FDR ratio {fdr}  positive rates {:.3?}  adversary u = {:.3?}",
            r.accuracy, r.positive_rate_per_group, out.params.u
        );
    }
    Ok(())
}
