use crate::dataset::AugmentedDataset;
use crate::error::Result;
use crate::math::axpy;
use crate::models::{gradients, Model, ModelParams};

use super::{apply_objective, modified_gradient, normal_gradient, OptimizerConfig, Recorder, RunOutput, StepInfo};

/// Descent-ascent with the plain `∇_w L_C - α ∇_w L_F` classifier step.
pub fn run_normal_gda(
    config: &OptimizerConfig,
    model: &Model,
    data: &AugmentedDataset,
    init: ModelParams,
) -> Result<RunOutput> {
    run_alternating(config, model, data, init, false)
}

/// Descent-ascent with the projection-removed classifier step.
pub fn run_ngd_modified(
    config: &OptimizerConfig,
    model: &Model,
    data: &AugmentedDataset,
    init: ModelParams,
) -> Result<RunOutput> {
    run_alternating(config, model, data, init, true)
}

/// Each iteration first ascends `u` at `(u_t, w_t)`, then descends `w` using
/// gradients at `(u_{t+1}, w_t)`.
fn run_alternating(
    config: &OptimizerConfig,
    model: &Model,
    data: &AugmentedDataset,
    init: ModelParams,
    modified: bool,
) -> Result<RunOutput> {
    config.validate()?;
    model.validate()?;
    init.check(&model.adversary, data)?;
    let mut params = init;
    let mut recorder = Recorder::new(model, data, config.threshold);

    for t in 1..=config.iterations {
        let alpha = config.alpha.at(t);
        if !params.u.is_empty() {
            let g = gradients(model, &params, data)?;
            axpy(config.eta_adversary, &g.grad_u_lf, &mut params.u);
        }
        let mut g = gradients(model, &params, data)?;
        apply_objective(config.objective, &mut g);
        let direction = if modified {
            modified_gradient(&g, alpha)
        } else {
            normal_gradient(&g, alpha)
        };
        axpy(-config.eta_classifier, &direction, &mut params.w);
        recorder.record(
            StepInfo {
                t,
                alpha,
                grad_w_lf: &g.grad_w_lf,
                grad_w_lc: &g.grad_w_lc,
                direction: &direction,
            },
            &params,
        )?;
    }

    Ok(RunOutput {
        params,
        trace: recorder.trace,
        tracker: recorder.tracker,
        smoothness: None,
        agd_history: Vec::new(),
    })
}
