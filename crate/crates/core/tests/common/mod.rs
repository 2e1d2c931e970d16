//! Independent oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use fairgda::dataset::{augment, Augmentation, AugmentedDataset, Dataset};
use fairgda::math::finite_diff_gradient;
use fairgda::models::{adversary_loss, classification_loss, gradients, Adversary, Model, ModelParams};
use rand::Rng;

pub const FD_STEP: f64 = 1e-5;

/// `max_i |a_i - b_i| / max(1, max_i |b_i|)`.
pub fn rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    let scale = numeric.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Random dataset with both sensitive groups present and `n` raw features.
pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, rows: usize) -> AugmentedDataset {
    let features: Vec<Vec<f64>> = (0..rows).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
    let mut z: Vec<u8> = (0..rows).map(|_| rng.gen_range(0..2)).collect();
    z[0] = 0;
    z[1] = 1;
    let y: Vec<u8> = (0..rows).map(|_| rng.gen_range(0..2)).collect();
    augment(&Dataset::from_rows(&features, y, z).unwrap(), Augmentation::Bias, 0)
}

pub fn random_adversary<R: Rng>(rng: &mut R, kind: usize) -> Adversary {
    let mu = rng.gen_range(0.001..0.1);
    match kind % 3 {
        0 => Adversary::StatisticalParity {
            degree: rng.gen_range(1..=3),
            mu,
        },
        1 => Adversary::FalseDiscovery { mu },
        _ => Adversary::ParityRegularizer { mu },
    }
}

pub fn random_params<R: Rng>(rng: &mut R, adv: &Adversary, data: &AugmentedDataset) -> ModelParams {
    ModelParams {
        w: (0..data.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        u: (0..adv.param_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    }
}

/// Relative errors of `(∇_w L_C, ∇_w L_F, ∇_u L_F)` against central differences.
pub fn gradient_errors(model: &Model, params: &ModelParams, data: &AugmentedDataset) -> [f64; 3] {
    let g = gradients(model, params, data).unwrap();
    let fd_lc = finite_diff_gradient(|w| classification_loss(w, model.ridge, data).unwrap(), &params.w, FD_STEP).unwrap();
    let fd_lf_w = finite_diff_gradient(
        |w| adversary_loss(&model.adversary, &ModelParams { w: w.to_vec(), u: params.u.clone() }, data).unwrap(),
        &params.w,
        FD_STEP,
    )
    .unwrap();
    let fd_lf_u = finite_diff_gradient(
        |u| adversary_loss(&model.adversary, &ModelParams { w: params.w.clone(), u: u.to_vec() }, data).unwrap(),
        &params.u,
        FD_STEP,
    )
    .unwrap();
    let u_err = if params.u.is_empty() { 0.0 } else { rel_err(&g.grad_u_lf, &fd_lf_u) };
    [rel_err(&g.grad_w_lc, &fd_lc), rel_err(&g.grad_w_lf, &fd_lf_w), u_err]
}

/// Contingency-table statistical rate and false discovery rate.
pub fn oracle_metrics(pred: &[u8], y: &[u8], z: &[u8]) -> (f64, Option<f64>) {
    // table[z][y][pred]
    let mut table = [[[0usize; 2]; 2]; 2];
    for i in 0..pred.len() {
        table[z[i] as usize][y[i] as usize][pred[i] as usize] += 1;
    }
    let ratio = |a: f64, b: f64| {
        if a == 0.0 && b == 0.0 {
            1.0
        } else if a == 0.0 || b == 0.0 {
            0.0
        } else {
            (a / b).min(b / a)
        }
    };
    let mut rate = [0.0; 2];
    let mut fdr = [None; 2];
    for g in 0..2 {
        let size: usize = table[g].iter().flatten().sum();
        let predicted_pos = table[g][0][1] + table[g][1][1];
        rate[g] = predicted_pos as f64 / size as f64;
        if predicted_pos > 0 {
            fdr[g] = Some(table[g][0][1] as f64 / predicted_pos as f64);
        }
    }
    let fdr = match fdr {
        [Some(a), Some(b)] => Some(ratio(b, a)),
        _ => None,
    };
    (ratio(rate[1], rate[0]), fdr)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for k in i..=j {
                r[idx[k]] = (i + j) as f64 / 2.0;
            }
            i = j + 1;
        }
        r
    }
    fairgda::math::pearson_correlation(&ranks(x), &ranks(y)).unwrap_or(f64::NAN)
}

pub fn range(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min)
}
