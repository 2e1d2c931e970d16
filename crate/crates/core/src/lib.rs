//! Fair binary classification by adversarial gradient descent-ascent.
//!
//! A logistic classifier `f(x) = σ(wᵀx̂)` is trained against an adversary that
//! tries to recover the sensitive attribute from the classifier's scores. The
//! classifier step removes the projection of its own gradient onto the
//! adversary's gradient, so accuracy gains never undo fairness progress.
//!
//! * [`dataset`]: CSV ingest, augmentation, splitting and correlation-controlled
//!   synthetic datasets.
//! * [`models`]: classifier and adversary losses with analytic gradients.
//! * [`optim`]: the descent-ascent loops, thresholding and diagnostics.
//! * [`metrics`]: accuracy, statistical rate and false discovery rate.
//! * [`cli`]: the `fairgda` command-line front end.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod math;
pub mod metrics;
pub mod models;
pub mod optim;

pub use error::{Error, Result};
