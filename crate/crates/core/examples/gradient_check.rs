//! Compares analytic gradients against central differences for each adversary.

use fairgda::dataset::{adult_like, augment, Augmentation};
use fairgda::math::finite_diff_gradient;
use fairgda::models::{adversary_loss, classification_loss, gradients, Adversary, Model, ModelParams};

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn main() -> fairgda::Result<()> {
    let data = augment(&adult_like(40, 3)?, Augmentation::Bias, 0);
    for adversary in [
        Adversary::StatisticalParity { degree: 2, mu: 0.01 },
        Adversary::FalseDiscovery { mu: 0.01 },
        Adversary::ParityRegularizer { mu: 0.01 },
    ] {
        let model = Model::new(adversary, 0.1);
        let mut params = ModelParams::zeros(&adversary, &data);
        for (k, w) in params.w.iter_mut().enumerate() {
            *w = 0.3 * ((k as f64) * 1.7).sin();
        }
        for (k, u) in params.u.iter_mut().enumerate() {
            *u = 0.2 * ((k as f64) + 0.5).cos();
        }
        let g = gradients(&model, &params, &data)?;
        let h = 1e-5;
        let fd_c = finite_diff_gradient(|w| classification_loss(w, model.ridge, &data).unwrap(), &params.w, h)?;
        let fd_fw = finite_diff_gradient(
            |w| adversary_loss(&adversary, &ModelParams { w: w.to_vec(), u: params.u.clone() }, &data).unwrap(),
            &params.w,
            h,
        )?;
        let fd_fu = finite_diff_gradient(
            |u| adversary_loss(&adversary, &ModelParams { w: params.w.clone(), u: u.to_vec() }, &data).unwrap(),
            &params.u,
            h,
        )?;
        println!(
            "{:<20} dL_C/dw {:.1e}  dL_F/dw {:.1e}  dL_F/du {:.1e}",
            adversary.name(),
            max_abs_diff(&g.grad_w_lc, &fd_c),
            max_abs_diff(&g.grad_w_lf, &fd_fw),
            max_abs_diff(&g.grad_u_lf, &fd_fu)
        );
    }
    Ok(())
}
