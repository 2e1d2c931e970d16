//! Gradient descent-ascent training loops.
//!
//! Every loop alternates an ascent step on the adversary parameters `u` with a
//! descent step on the classifier weights `w`:
//!
//! * [`Algorithm::NormalGda`] steps along `∇_w L_C - α ∇_w L_F`.
//! * [`Algorithm::NgdModified`] steps along [`modified_gradient`], which also
//!   removes the projection of `∇_w L_C` onto `∇_w L_F`.
//! * [`Algorithm::AgdModified`] runs the accelerated scheme for noisy gradient
//!   oracles on the modified direction, with `ψ(w) = ½‖w‖²` and
//!   `a_t = 1 / (α_t L₁ L₂ √t)`, and reports the averaged iterate `q_t`.
//!
//! Each iteration is recorded in a [`TrainingTrace`], and a
//! [`ThresholdTracker`] keeps the most accurate iterate whose training fairness
//! meets the requested threshold.

mod agd;
mod diagnostics;
mod gda;
mod smoothness;
mod threshold;
mod trace;
mod update;

pub use agd::{run_agd_modified, step_weight, AgdState};
pub use diagnostics::{
    accelerated_bound_surrogate, diagnose_convergence, displayed_divergence, ConvergenceDiagnostics, Reference,
};
pub use gda::{run_ngd_modified, run_normal_gda};
pub use smoothness::{estimate_smoothness, SMOOTHNESS_FLOOR, SMOOTHNESS_SAFETY};
pub use threshold::{Snapshot, ThresholdOutcome, ThresholdTracker};
pub use trace::{read_trace, write_trace, TraceRecord, TrainingTrace, TRACE_COLUMNS};
pub use update::{identity_residual, identity_tolerance, modified_gradient, normal_gradient};

use crate::dataset::AugmentedDataset;
use crate::error::{Error, Result};
use crate::models::{Model, ModelParams};

/// Losses above this magnitude abort the run.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    NormalGda,
    NgdModified,
    AgdModified,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::NormalGda, Algorithm::NgdModified, Algorithm::AgdModified];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::NormalGda => "normal_gda",
            Algorithm::NgdModified => "ngd_modified",
            Algorithm::AgdModified => "agd_modified",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// `α_t = α₀ · t^{-p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSchedule {
    pub alpha0: f64,
    pub power: f64,
}

impl AlphaSchedule {
    pub fn constant(alpha: f64) -> Self {
        AlphaSchedule { alpha0: alpha, power: 0.0 }
    }

    /// Constant `α = max(1/L₁, 1/L₂)`, the setting of the accelerated method's
    /// convergence bound.
    pub fn bound_constant(l1: f64, l2: f64) -> Self {
        Self::constant((1.0 / l1).max(1.0 / l2))
    }

    pub fn at(&self, t: usize) -> f64 {
        if self.power == 0.0 {
            self.alpha0
        } else {
            self.alpha0 * (t as f64).powf(-self.power)
        }
    }
}

impl Default for AlphaSchedule {
    fn default() -> Self {
        AlphaSchedule { alpha0: 0.1, power: 0.5 }
    }
}

/// Which loss terms drive the classifier step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    Joint,
    /// Drop `∇_w L_C`; the classifier only follows the adversary loss.
    FairnessOnly,
    /// Drop `∇_w L_F`; plain regularized logistic regression.
    AccuracyOnly,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joint" => Ok(Objective::Joint),
            "fairness_only" => Ok(Objective::FairnessOnly),
            "accuracy_only" => Ok(Objective::AccuracyOnly),
            other => Err(Error::Config(format!("unknown objective `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    /// Adversary ascent rate `η₁` (`η` of the accelerated method).
    pub eta_adversary: f64,
    /// Classifier descent rate `η₂`; unused by the accelerated method.
    pub eta_classifier: f64,
    pub alpha: AlphaSchedule,
    pub iterations: usize,
    /// Fairness threshold `τ`; `None` disables thresholding.
    pub threshold: Option<f64>,
    pub seed: u64,
    pub objective: Objective,
    /// `(L₁, L₂)` for the accelerated method; estimated when `None`.
    pub smoothness: Option<(f64, f64)>,
    pub smoothness_samples: usize,
    pub smoothness_radius: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            algorithm: Algorithm::AgdModified,
            eta_adversary: 0.1,
            eta_classifier: 0.1,
            alpha: AlphaSchedule::default(),
            iterations: 100,
            threshold: None,
            seed: 0,
            objective: Objective::Joint,
            smoothness: None,
            smoothness_samples: 16,
            smoothness_radius: 1.0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        for (name, v) in [("eta_adversary", self.eta_adversary), ("eta_classifier", self.eta_classifier)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a finite non-negative rate, got {v}"));
            }
        }
        if !(self.alpha.alpha0 >= 0.0 && self.alpha.alpha0.is_finite()) {
            return bad(format!("alpha0 must be non-negative, got {}", self.alpha.alpha0));
        }
        if !(0.0..=1.0).contains(&self.alpha.power) {
            return bad(format!("alpha power must lie in [0, 1], got {}", self.alpha.power));
        }
        if self.algorithm == Algorithm::AgdModified && self.alpha.alpha0 == 0.0 {
            return bad("the accelerated method needs alpha0 > 0".into());
        }
        if let Some(tau) = self.threshold {
            if !(tau > 0.0 && tau <= 1.0) {
                return bad(format!("threshold must lie in (0, 1], got {tau}"));
            }
        }
        if let Some((l1, l2)) = self.smoothness {
            if !(l1 > 0.0 && l2 > 0.0) {
                return bad("smoothness constants must be positive".into());
            }
        }
        Ok(())
    }
}

/// Everything a training run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Final reported parameters (`(u_T, q_T)` for the accelerated method).
    pub params: ModelParams,
    pub trace: TrainingTrace,
    pub tracker: ThresholdTracker,
    /// `(L₁, L₂)` used by the accelerated method.
    pub smoothness: Option<(f64, f64)>,
    /// Per-iteration accelerated-method state.
    pub agd_history: Vec<AgdState>,
}

impl RunOutput {
    /// Threshold-selected parameters, or the final iterate when thresholding
    /// is disabled or infeasible.
    pub fn selected(&self) -> ThresholdOutcome {
        self.tracker.outcome().expect("a run records at least one iterate")
    }
}

/// Runs `config.algorithm` from `init` (zeros when `None`).
pub fn train(
    config: &OptimizerConfig,
    model: &Model,
    data: &AugmentedDataset,
    init: Option<ModelParams>,
) -> Result<RunOutput> {
    let init = init.unwrap_or_else(|| ModelParams::zeros(&model.adversary, data));
    match config.algorithm {
        Algorithm::NormalGda => run_normal_gda(config, model, data, init),
        Algorithm::NgdModified => run_ngd_modified(config, model, data, init),
        Algorithm::AgdModified => run_agd_modified(config, model, data, init),
    }
}

/// `(L₁, L₂)`: smoothness of `w ↦ ∇_w L_C` and of `(u, w) ↦ ∇ L_F`, estimated
/// around `at`.
pub fn estimate_loss_smoothness(
    config: &OptimizerConfig,
    model: &Model,
    data: &AugmentedDataset,
    at: &ModelParams,
) -> Result<(f64, f64)> {
    let u_dim = at.u.len();
    let lc = estimate_smoothness(
        |w| {
            let p = ModelParams { w: w.to_vec(), u: at.u.clone() };
            Ok(crate::models::gradients(model, &p, data)?.grad_w_lc)
        },
        &at.w,
        config.smoothness_radius,
        config.smoothness_samples,
        config.seed,
    )?;
    let joint: Vec<f64> = at.u.iter().chain(&at.w).copied().collect();
    let lf = estimate_smoothness(
        |x| {
            let p = ModelParams {
                u: x[..u_dim].to_vec(),
                w: x[u_dim..].to_vec(),
            };
            let g = crate::models::gradients(model, &p, data)?;
            Ok(g.grad_u_lf.into_iter().chain(g.grad_w_lf).collect())
        },
        &joint,
        config.smoothness_radius,
        config.smoothness_samples,
        config.seed.wrapping_add(1),
    )?;
    Ok((lc, lf))
}

/// Shared per-iteration bookkeeping: metrics at the reported iterate, trace
/// record, divergence guard and threshold tracking.
pub(crate) struct Recorder<'a> {
    model: &'a Model,
    data: &'a AugmentedDataset,
    pub trace: TrainingTrace,
    pub tracker: ThresholdTracker,
}

pub(crate) struct StepInfo<'a> {
    pub t: usize,
    pub alpha: f64,
    pub grad_w_lf: &'a [f64],
    pub grad_w_lc: &'a [f64],
    pub direction: &'a [f64],
}

impl<'a> Recorder<'a> {
    pub fn new(model: &'a Model, data: &'a AugmentedDataset, threshold: Option<f64>) -> Self {
        Recorder {
            model,
            data,
            trace: TrainingTrace::default(),
            tracker: ThresholdTracker::new(threshold),
        }
    }

    pub fn record(&mut self, step: StepInfo<'_>, reported: &ModelParams) -> Result<()> {
        use crate::math::{norm, sub};
        use crate::metrics::MetricReport;

        let eval = if reported.is_finite() {
            Some(crate::models::evaluate(self.model, reported, self.data)?)
        } else {
            None
        };
        let (lc, lf) = eval
            .as_ref()
            .map_or((f64::NAN, f64::NAN), |e| (e.classification_loss, e.adversary_loss));
        let worst = if lc.is_finite() && lf.is_finite() { lc.abs().max(lf.abs()) } else { f64::INFINITY };
        if worst > DIVERGENCE_LIMIT {
            return Err(Error::Divergence {
                iteration: step.t,
                loss: if lc.is_finite() { lf } else { lc },
                partial: Box::new(std::mem::take(&mut self.trace)),
            });
        }
        let eval = eval.expect("finite parameters were evaluated");
        let report = MetricReport::compute(&eval.probabilities, self.data.base())?;
        let fairness = report.fairness(self.model.adversary.metric());

        self.trace.records.push(TraceRecord {
            t: step.t,
            classification_loss: lc,
            adversary_loss: lf,
            accuracy: report.accuracy,
            fairness,
            identity_residual: identity_residual(step.grad_w_lf, step.direction, step.alpha),
            grad_norm_f: norm(step.grad_w_lf),
            grad_norm_c: norm(step.grad_w_lc),
            alpha: step.alpha,
        });
        self.trace.iterates.push(reported.clone());
        self.trace.soft_group_means.push(report.soft_mean_per_group);
        self.trace.deviation_norms.push(norm(&sub(step.direction, step.grad_w_lc)));
        self.tracker.observe(step.t, reported, report.accuracy, fairness);
        Ok(())
    }
}

/// Applies the configured objective to a gradient triple.
pub(crate) fn apply_objective(objective: Objective, grads: &mut crate::models::LossGradients) {
    match objective {
        Objective::Joint => {}
        Objective::FairnessOnly => grads.grad_w_lc.iter_mut().for_each(|v| *v = 0.0),
        Objective::AccuracyOnly => grads.grad_w_lf.iter_mut().for_each(|v| *v = 0.0),
    }
}
