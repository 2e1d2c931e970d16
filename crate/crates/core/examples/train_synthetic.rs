//! One accelerated run on census-like data relabeled to correlation 0.5.

use fairgda::dataset::{adult_like, augment, make_synthetic, split, Augmentation};
use fairgda::metrics::MetricReport;
use fairgda::models::{classify_soft, Adversary, Model};
use fairgda::optim::{train, Algorithm, OptimizerConfig};

fn main() -> fairgda::Result<()> {
    let synthetic = make_synthetic(&adult_like(5000, 0)?, 0.5, 1)?;
    println!("label/sensitive correlation {:.3} after {} flips", synthetic.correlation, synthetic.flips);
    let (train_set, test_set) = split(&synthetic.dataset, 0.3, 2)?;
    let tr = augment(&train_set, Augmentation::Bias, 0);
    let te = augment(&test_set, Augmentation::Bias, 0);

    let n = tr.len() as f64;
    let model = Model::new(Adversary::StatisticalParity { degree: 2, mu: 5.0 / (n * n) }, 1e-3);
    let config = OptimizerConfig {
        algorithm: Algorithm::AgdModified,
        eta_adversary: 1.0,
        eta_classifier: 1.0,
        threshold: Some(0.8),
        ..Default::default()
    };
    let out = train(&config, &model, &tr, None)?;
    for r in out.trace.records.iter().step_by(10) {
        println!(
            "t={:>3}  L_C {:.4}  L_F {:+.4}  acc {:.3}  SR {:.3}",
            r.t,
            r.classification_loss,
            r.adversary_loss,
            r.accuracy,
            r.fairness.unwrap_or(f64::NAN)
        );
    }
    let (l1, l2) = out.smoothness.unwrap();
    println!("smoothness estimates L1 {l1:.3e}  L2 {l2:.3e}");

    let selected = out.selected();
    let report = MetricReport::compute(&classify_soft(&selected.snapshot.params.w, &te)?, te.base())?;
    println!(
        "threshold-selected iterate {} -> test accuracy {:.3}, test SR {:.3}",
        selected.snapshot.iteration, report.accuracy, report.statistical_rate
    );
    Ok(())
}
