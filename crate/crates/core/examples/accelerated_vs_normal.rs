//! Accelerated versus alternating modified updates, with convergence
//! diagnostics for both.

use fairgda::dataset::{adult_like, augment, make_synthetic, split, Augmentation};
use fairgda::models::{Adversary, Model};
use fairgda::optim::{accelerated_bound_surrogate, diagnose_convergence, train, Algorithm, OptimizerConfig, Reference};

fn main() -> fairgda::Result<()> {
    let (tr, _) = split(&make_synthetic(&adult_like(5000, 0)?, 0.5, 1)?.dataset, 0.3, 2)?;
    let tr = augment(&tr, Augmentation::Bias, 0);
    let n = tr.len() as f64;
    let model = Model::new(Adversary::StatisticalParity { degree: 2, mu: 5.0 / (n * n) }, 1e-3);
    let run = |algorithm| {
        let config = OptimizerConfig {
            algorithm,
            eta_adversary: 1.0,
            eta_classifier: 1.0,
            ..Default::default()
        };
        train(&config, &model, &tr, None)
    };
    let agd = run(Algorithm::AgdModified)?;
    let ngd = run(Algorithm::NgdModified)?;
    let reference = Reference::best_of([&agd.trace, &ngd.trace]);

    for (name, out) in [("agd_modified", &agd), ("ngd_modified", &ngd)] {
        let first = |tau| out.trace.first_reaching(tau).map_or("never".to_string(), |t| t.to_string());
        let d = diagnose_convergence(&out.trace, reference, out.smoothness).expect("non-empty trace");
        println!(
            "{name}: SR>=0.8 at {}, SR>=0.9 at {}, final SR {:.3}, epsilon {:.2e}, delta {:.2e}, max deviation {:.2e}",
            first(0.8),
            first(0.9),
            out.trace.last().unwrap().fairness.unwrap(),
            d.epsilon,
            d.delta,
            d.max_deviation
        );
    }
    let w0 = vec![0.0; tr.dim()];
    if let Some(bound) = accelerated_bound_surrogate(&agd.agd_history, &w0, &agd.trace.deviation_norms) {
        println!("accelerated bound surrogate after {} steps: {bound:.3e}", agd.agd_history.len());
    }
    Ok(())
}
