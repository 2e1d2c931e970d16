//! Empirical surrogates for the quantities in the convergence analysis.
//!
//! True saddle points are unknown, so residual curves are measured against a
//! [`Reference`] made of the best values observed, which is a proxy rather
//! than the optimum.

use crate::math::{dot, norm, norm_sq, sub};

use super::{AgdState, TrainingTrace};

/// Best observed objective values: the largest `L_F` and the smallest `L_C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub adversary_loss: f64,
    pub classification_loss: f64,
}

impl Reference {
    /// Extremes over one trace; `None` for an empty trace.
    pub fn from_trace(trace: &TrainingTrace) -> Option<Self> {
        Self::best_of(std::iter::once(trace))
    }

    /// Extremes over several runs on the same dataset.
    pub fn best_of<'a>(traces: impl IntoIterator<Item = &'a TrainingTrace>) -> Option<Self> {
        let mut best: Option<Reference> = None;
        for r in traces.into_iter().flat_map(|t| &t.records) {
            let b = best.get_or_insert(Reference {
                adversary_loss: r.adversary_loss,
                classification_loss: r.classification_loss,
            });
            b.adversary_loss = b.adversary_loss.max(r.adversary_loss);
            b.classification_loss = b.classification_loss.min(r.classification_loss);
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceDiagnostics {
    /// `max_t max(‖∇L_C‖/‖∇L_F‖, ‖∇L_F‖/‖∇L_C‖)` over iterations with both
    /// norms nonzero; `None` if there are none.
    pub gradient_bound: Option<f64>,
    /// `(L₁, L₂)` if known.
    pub smoothness: Option<(f64, f64)>,
    /// `max_t ‖θ_t - θ_T‖` over recorded iterates `θ = (u, w)`.
    pub diameter: f64,
    pub reference: Reference,
    /// `R_F(t) = L_F* - L_F(t)`.
    pub adversary_residual: Vec<f64>,
    /// `R_C(t) = L_C(t) - L_C*`.
    pub classification_residual: Vec<f64>,
    /// `ε = max L_F - final L_F` over the trace.
    pub epsilon: f64,
    /// `δ = final L_C - min L_C` over the trace.
    pub delta: f64,
    /// Largest deviation of the classifier step from plain descent.
    pub max_deviation: f64,
}

impl ConvergenceDiagnostics {
    /// Whether the final adversary residual is within `eps`.
    pub fn adversary_within(&self, eps: f64) -> bool {
        self.adversary_residual.last().is_some_and(|r| *r <= eps)
    }
}

/// Summarizes a completed trace. `reference` defaults to the trace's own
/// extremes. Returns `None` for an empty trace.
pub fn diagnose_convergence(
    trace: &TrainingTrace,
    reference: Option<Reference>,
    smoothness: Option<(f64, f64)>,
) -> Option<ConvergenceDiagnostics> {
    let last = trace.last()?;
    let own = Reference::from_trace(trace)?;
    let reference = reference.unwrap_or(own);

    let gradient_bound = trace
        .records
        .iter()
        .filter(|r| r.grad_norm_c > 0.0 && r.grad_norm_f > 0.0)
        .map(|r| (r.grad_norm_c / r.grad_norm_f).max(r.grad_norm_f / r.grad_norm_c))
        .reduce(f64::max);

    let flatten = |p: &crate::models::ModelParams| -> Vec<f64> { p.u.iter().chain(&p.w).copied().collect() };
    let diameter = trace.iterates.last().map_or(0.0, |end| {
        let end = flatten(end);
        trace
            .iterates
            .iter()
            .map(|p| norm(&sub(&flatten(p), &end)))
            .fold(0.0, f64::max)
    });

    Some(ConvergenceDiagnostics {
        gradient_bound,
        smoothness,
        diameter,
        reference,
        adversary_residual: trace
            .records
            .iter()
            .map(|r| reference.adversary_loss - r.adversary_loss)
            .collect(),
        classification_residual: trace
            .records
            .iter()
            .map(|r| r.classification_loss - reference.classification_loss)
            .collect(),
        epsilon: own.adversary_loss - last.adversary_loss,
        delta: last.classification_loss - own.classification_loss,
        max_deviation: trace.deviation_norms.iter().copied().fold(0.0, f64::max),
    })
}

/// `½‖w₁‖² + ½‖w₂‖² - 2⟨w₁, w₂⟩`, the divergence term of the accelerated bound.
pub fn displayed_divergence(w1: &[f64], w2: &[f64]) -> f64 {
    0.5 * norm_sq(w1) + 0.5 * norm_sq(w2) - 2.0 * dot(w1, w2)
}

/// Right-hand side of the accelerated classifier bound evaluated with observed
/// surrogates: `𝒟(w₀, w*)/A_T + R Σ a_t‖λ_t‖ / A_T`, taking `w*` to be the final
/// averaged iterate and `R` the largest distance of any `w_t` from it.
pub fn accelerated_bound_surrogate(history: &[AgdState], w0: &[f64], deviation_norms: &[f64]) -> Option<f64> {
    let last = history.last()?;
    let w_star = &last.q;
    let radius = history
        .iter()
        .map(|s| norm(&sub(&s.w, w_star)))
        .fold(norm(&sub(w0, w_star)), f64::max);
    let noise: f64 = history.iter().zip(deviation_norms).map(|(s, d)| s.a * d).sum();
    Some(displayed_divergence(w0, w_star) / last.a_sum + radius * noise / last.a_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelParams;
    use crate::optim::TraceRecord;

    fn record(t: usize, lc: f64, lf: f64, gc: f64, gf: f64) -> TraceRecord {
        TraceRecord {
            t,
            classification_loss: lc,
            adversary_loss: lf,
            accuracy: 0.5,
            fairness: Some(1.0),
            identity_residual: 0.0,
            grad_norm_f: gf,
            grad_norm_c: gc,
            alpha: 0.1,
        }
    }

    fn trace(records: Vec<TraceRecord>) -> TrainingTrace {
        let n = records.len();
        TrainingTrace {
            records,
            iterates: (0..n).map(|i| ModelParams { w: vec![i as f64, 0.0], u: vec![] }).collect(),
            soft_group_means: vec![[0.5; 2]; n],
            deviation_norms: vec![0.0; n],
        }
    }

    #[test]
    fn equal_norms_give_unit_bound() {
        let t = trace((1..=4).map(|i| record(i, 1.0, -1.0, 2.0, 2.0)).collect());
        let d = diagnose_convergence(&t, None, None).unwrap();
        assert_eq!(d.gradient_bound, Some(1.0));
        assert_eq!(d.diameter, 3.0);
    }

    #[test]
    fn epsilon_delta_from_extremes() {
        let t = trace(vec![
            record(1, 0.9, -0.5, 1.0, 2.0),
            record(2, 0.4, -0.2, 1.0, 0.0),
            record(3, 0.6, -0.3, 3.0, 1.0),
        ]);
        let d = diagnose_convergence(&t, None, None).unwrap();
        assert!((d.epsilon - 0.1).abs() < 1e-15);
        assert!((d.delta - 0.2).abs() < 1e-15);
        assert_eq!(d.gradient_bound, Some(3.0));
        assert!(d.adversary_within(0.1 + 1e-12));
        assert!(!d.adversary_within(0.05));
        let external = Reference { adversary_loss: 0.0, classification_loss: 0.0 };
        let d = diagnose_convergence(&t, Some(external), None).unwrap();
        assert_eq!(d.classification_residual, vec![0.9, 0.4, 0.6]);
        assert!(diagnose_convergence(&TrainingTrace::default(), None, None).is_none());
    }

    #[test]
    fn divergence_term() {
        assert_eq!(displayed_divergence(&[1.0, 0.0], &[1.0, 0.0]), -1.0);
        assert_eq!(displayed_divergence(&[1.0, 2.0], &[0.0, 0.0]), 2.5);
    }
}
