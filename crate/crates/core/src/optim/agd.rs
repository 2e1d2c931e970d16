use crate::dataset::AugmentedDataset;
use crate::error::Result;
use crate::math::axpy;
use crate::models::{gradients, Model, ModelParams};

use super::{
    apply_objective, estimate_loss_smoothness, modified_gradient, OptimizerConfig, Recorder, RunOutput, StepInfo,
};

/// Accelerated-method state after iteration `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgdState {
    pub t: usize,
    pub a: f64,
    /// `A_t = Σ_{i≤t} a_i`.
    pub a_sum: f64,
    pub w: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub u: Vec<f64>,
}

/// Step weight `a_t = 1 / (α L₁ L₂ √t)`.
pub fn step_weight(alpha: f64, l1: f64, l2: f64, t: usize) -> f64 {
    1.0 / (alpha * l1 * l2 * (t as f64).sqrt())
}

/// Accelerated descent-ascent on the modified direction.
///
/// With `ψ(w) = ½‖w‖²` (so `∇ψ(w) = w`) each iteration performs
///
/// ```text
/// u_t = u_{t-1} + η ∇_u L_F
/// p_t = (A_{t-1}/A_t) q_{t-1} + (a_t/A_t) w_{t-1}
/// w_t = w_{t-1} - a_t g(w_{t-1})
/// q_t = (A_{t-1}/A_t) q_{t-1} + (a_t/A_t) w_t
/// ```
///
/// starting from `q_0 = w_0`. Metrics and thresholding use `(u_t, q_t)` and
/// the returned parameters are `(u_T, q_T)`.
pub fn run_agd_modified(
    config: &OptimizerConfig,
    model: &Model,
    data: &AugmentedDataset,
    init: ModelParams,
) -> Result<RunOutput> {
    config.validate()?;
    model.validate()?;
    init.check(&model.adversary, data)?;
    let (l1, l2) = match config.smoothness {
        Some(l) => l,
        None => estimate_loss_smoothness(config, model, data, &init)?,
    };

    let mut u = init.u.clone();
    let mut w = init.w.clone();
    let mut q = init.w.clone();
    let mut a_sum = 0.0;
    let mut history = Vec::with_capacity(config.iterations);
    let mut recorder = Recorder::new(model, data, config.threshold);

    for t in 1..=config.iterations {
        let alpha = config.alpha.at(t);
        if !u.is_empty() {
            let g = gradients(model, &ModelParams { w: w.clone(), u: u.clone() }, data)?;
            axpy(config.eta_adversary, &g.grad_u_lf, &mut u);
        }
        let mut grads = gradients(model, &ModelParams { w: w.clone(), u: u.clone() }, data)?;
        apply_objective(config.objective, &mut grads);
        let direction = modified_gradient(&grads, alpha);

        let a = step_weight(alpha, l1, l2, t);
        let prev_sum = a_sum;
        a_sum += a;
        let (keep, take) = (prev_sum / a_sum, a / a_sum);
        let p: Vec<f64> = q.iter().zip(&w).map(|(qi, wi)| keep * qi + take * wi).collect();
        axpy(-a, &direction, &mut w);
        q = q.iter().zip(&w).map(|(qi, wi)| keep * qi + take * wi).collect();

        let reported = ModelParams { w: q.clone(), u: u.clone() };
        recorder.record(
            StepInfo {
                t,
                alpha,
                grad_w_lf: &grads.grad_w_lf,
                grad_w_lc: &grads.grad_w_lc,
                direction: &direction,
            },
            &reported,
        )?;
        history.push(AgdState {
            t,
            a,
            a_sum,
            w: w.clone(),
            p,
            q: q.clone(),
            u: u.clone(),
        });
    }

    Ok(RunOutput {
        params: ModelParams { w: q, u },
        trace: recorder.trace,
        tracker: recorder.tracker,
        smoothness: Some((l1, l2)),
        agd_history: history,
    })
}
