//! Regularizer-only adversary on data where `z` nearly decides `y`: the plain
//! step lets the parity penalty grow while the modified step removes it.

use fairgda::dataset::{augment, Augmentation, Dataset};
use fairgda::models::{Adversary, Model};
use fairgda::optim::{train, Algorithm, AlphaSchedule, OptimizerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fairgda::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut rows, mut y, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..200 {
        let zi = (i % 2) as u8;
        y.push(if rng.gen::<f64>() < 0.9 { zi } else { 1 - zi });
        rows.push(vec![f64::from(zi) + 0.1 * rng.gen::<f64>(), rng.gen::<f64>()]);
        z.push(zi);
    }
    let data = augment(&Dataset::from_rows(&rows, y, z)?, Augmentation::Bias, 0);
    let model = Model::from(Adversary::ParityRegularizer { mu: 1e-3 });

    for algorithm in [Algorithm::NormalGda, Algorithm::NgdModified] {
        let config = OptimizerConfig {
            algorithm,
            alpha: AlphaSchedule::constant(0.1),
            ..Default::default()
        };
        let out = train(&config, &model, &data, None)?;
        println!("{}", algorithm.name());
        for r in out.trace.records.iter().filter(|r| r.t == 1 || r.t % 25 == 0) {
            println!(
                "  t={:>3}  L_F {:+.5}  SR {:.3}  accuracy {:.3}",
                r.t,
                r.adversary_loss,
                r.fairness.unwrap(),
                r.accuracy
            );
        }
    }
    Ok(())
}
