use crate::math::{dot, norm, norm_sq, project, PROJECTION_EPS};
use crate::models::LossGradients;

/// Projection-removed classifier direction
/// `∇_w L_C - α ∇_w L_F - Π_{∇_w L_F} ∇_w L_C`.
///
/// Its inner product with `∇_w L_F` is exactly `-α ‖∇_w L_F‖²`, so a descent
/// step along it never moves against the adversary's gradient beyond the
/// α-weighted pull. Falls back to `∇_w L_C` when `‖∇_w L_F‖ < PROJECTION_EPS`.
pub fn modified_gradient(grads: &LossGradients, alpha: f64) -> Vec<f64> {
    let c = &grads.grad_w_lc;
    let f = &grads.grad_w_lf;
    if norm(f) < PROJECTION_EPS {
        return c.clone();
    }
    let proj = project(c, f).expect("gradient dimensions agree");
    c.iter()
        .zip(f)
        .zip(&proj)
        .map(|((ci, fi), pi)| ci - alpha * fi - pi)
        .collect()
}

/// Plain descent-ascent direction `∇_w L_C - α ∇_w L_F`.
pub fn normal_gradient(grads: &LossGradients, alpha: f64) -> Vec<f64> {
    grads
        .grad_w_lc
        .iter()
        .zip(&grads.grad_w_lf)
        .map(|(c, f)| c - alpha * f)
        .collect()
}

/// `⟨∇_w L_F, g⟩ + α ‖∇_w L_F‖²`, zero (up to rounding) for the modified direction.
pub fn identity_residual(grad_w_lf: &[f64], direction: &[f64], alpha: f64) -> f64 {
    dot(grad_w_lf, direction) + alpha * norm_sq(grad_w_lf)
}

/// Acceptance bound on [`identity_residual`]: `1e-8 · (1 + ‖∇_w L_F‖²)`.
pub fn identity_tolerance(grad_w_lf: &[f64]) -> f64 {
    1e-8 * (1.0 + norm_sq(grad_w_lf))
}
