use crate::models::ModelParams;

/// One observed iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub params: ModelParams,
    pub accuracy: f64,
    pub fairness: Option<f64>,
}

/// Keeps the most accurate iterate whose training fairness is at least `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTracker {
    tau: Option<f64>,
    best: Option<Snapshot>,
    last: Option<Snapshot>,
}

/// Parameters selected at the end of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdOutcome {
    pub snapshot: Snapshot,
    /// No iterate met the threshold and the final iterate was returned instead.
    pub below_threshold: bool,
}

impl ThresholdTracker {
    /// `None` disables thresholding; the tracker then mirrors the final iterate.
    pub fn new(tau: Option<f64>) -> Self {
        ThresholdTracker {
            tau,
            best: None,
            last: None,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    pub fn best(&self) -> Option<&Snapshot> {
        self.best.as_ref()
    }

    /// Replaces the stored iterate iff fairness ≥ τ and accuracy strictly
    /// exceeds the best so far; ties keep the earlier iterate.
    pub fn observe(&mut self, iteration: usize, params: &ModelParams, accuracy: f64, fairness: Option<f64>) {
        let snapshot = Snapshot {
            iteration,
            params: params.clone(),
            accuracy,
            fairness,
        };
        if let Some(tau) = self.tau {
            let feasible = fairness.is_some_and(|f| f >= tau);
            let better = self.best.as_ref().is_none_or(|b| accuracy > b.accuracy);
            if feasible && better {
                self.best = Some(snapshot.clone());
            }
        }
        self.last = Some(snapshot);
    }

    /// `None` only if nothing was observed.
    pub fn outcome(&self) -> Option<ThresholdOutcome> {
        match (self.tau, &self.best, &self.last) {
            (Some(_), Some(best), _) => Some(ThresholdOutcome {
                snapshot: best.clone(),
                below_threshold: false,
            }),
            (Some(_), None, Some(last)) => Some(ThresholdOutcome {
                snapshot: last.clone(),
                below_threshold: true,
            }),
            (None, _, Some(last)) => Some(ThresholdOutcome {
                snapshot: last.clone(),
                below_threshold: false,
            }),
            (_, _, None) => None,
        }
    }
}
