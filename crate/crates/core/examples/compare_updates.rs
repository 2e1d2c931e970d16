//! Plain versus projection-removed classifier steps across label correlations.

use fairgda::dataset::{adult_like, augment, make_synthetic, split, Augmentation};
use fairgda::metrics::MetricReport;
use fairgda::models::{classify_soft, Adversary, Model};
use fairgda::optim::{train, Algorithm, Objective, OptimizerConfig, AlphaSchedule};

fn main() -> fairgda::Result<()> {
    let base = adult_like(6000, 0)?;
    println!("corr  algorithm       test acc  test SR");
    for corr in [0.3, 0.5, 0.7, 0.9] {
        let (tr, te) = split(&make_synthetic(&base, corr, 1)?.dataset, 0.3, 2)?;
        let (tr, te) = (augment(&tr, Augmentation::Bias, 0), augment(&te, Augmentation::Bias, 0));
        let n = tr.len() as f64;
        let model = Model::new(Adversary::StatisticalParity { degree: 2, mu: 5.0 / (n * n) }, 1e-3);
        let base_config = OptimizerConfig {
            eta_adversary: 1.0,
            eta_classifier: 1.0,
            ..Default::default()
        };
        let runs = [
            ("normal_gda", OptimizerConfig { algorithm: Algorithm::NormalGda, ..base_config.clone() }),
            ("ngd_modified", OptimizerConfig { algorithm: Algorithm::NgdModified, ..base_config.clone() }),
            ("agd_modified", OptimizerConfig { algorithm: Algorithm::AgdModified, ..base_config.clone() }),
            (
                "accuracy_only",
                OptimizerConfig { algorithm: Algorithm::NgdModified, objective: Objective::AccuracyOnly, ..base_config.clone() },
            ),
            (
                "fairness_only",
                OptimizerConfig {
                    algorithm: Algorithm::NgdModified,
                    objective: Objective::FairnessOnly,
                    alpha: AlphaSchedule::constant(10.0),
                    ..base_config.clone()
                },
            ),
        ];
        for (name, config) in runs {
            let out = train(&config, &model, &tr, None)?;
            let r = MetricReport::compute(&classify_soft(&out.params.w, &te)?, te.base())?;
            println!("{corr:<5} {name:<15} {:.3}     {:.3}", r.accuracy, r.statistical_rate);
        }
    }
    Ok(())
}
