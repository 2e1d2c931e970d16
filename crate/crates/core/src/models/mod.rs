//! Logistic classifier, fairness adversaries, their losses and analytic gradients.
//!
//! The classifier is `f(x̂) = σ(wᵀx̂)` with loss
//! `L_C(w) = log-loss(f, y) + (λ/2)‖w‖²`, where the ridge weight `λ` defaults
//! to 1. Each adversary owns parameters `u` and a
//! loss `L_F(u, w)` that the adversary maximizes; the optimizers in
//! [`crate::optim`] pit the two against each other.
//!
//! Three adversaries are available:
//!
//! * [`Adversary::StatisticalParity`]: `g = σ(uᵀ[1, s, s², …, s^d])` with
//!   `s = wᵀx̂`, predicting `z`, plus the penalty
//!   `-(μ/2)(Σ_{G_0} s_i / P[G_0] - Σ_{G_1} s_i / P[G_1])²`.
//! * [`Adversary::FalseDiscovery`]: `g = σ(uᵀ[1, f(x̂), y])`, plus the penalty
//!   `-(μ/2)(Σ_{y=0,z=1} s · Σ_{z=0} s - Σ_{y=0,z=0} s · Σ_{z=1} s)²`.
//! * [`Adversary::ParityRegularizer`]: no learned parameters, only
//!   `-(μ/2)(Σ_{G_0} σ(s_i) / P[G_0] - Σ_{G_1} σ(s_i) / P[G_1])²`. This is the
//!   regularizer-only setting in which the plain descent-ascent step is known
//!   to drift away from parity.
//!
//! Penalty sums are raw sums over the training sample (not means), so their
//! scale grows with `N²`; `μ` must be chosen with the sample size in mind.

mod checkpoint;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};

use serde::{Deserialize, Serialize};

use crate::dataset::AugmentedDataset;
use crate::error::{check_dim, Error, Result};
use crate::math::{dot, log_loss, norm_sq, sigmoid};

/// Default penalty weight.
pub const DEFAULT_MU: f64 = 1.0;
/// Default degree of the statistical-parity adversary's score expansion.
pub const DEFAULT_DEGREE: usize = 2;
/// Default weight of the classifier's `½‖w‖²` term.
pub const DEFAULT_RIDGE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Adversary {
    StatisticalParity { degree: usize, mu: f64 },
    FalseDiscovery { mu: f64 },
    ParityRegularizer { mu: f64 },
}

impl Default for Adversary {
    fn default() -> Self {
        Adversary::StatisticalParity {
            degree: DEFAULT_DEGREE,
            mu: DEFAULT_MU,
        }
    }
}

/// Which fairness metric an adversary targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessMetric {
    StatisticalRate,
    FalseDiscoveryRate,
}

impl Adversary {
    pub fn from_name(name: &str, degree: usize, mu: f64) -> Result<Self> {
        let adv = match name {
            "statistical_parity" | "sp" => Adversary::StatisticalParity { degree, mu },
            "false_discovery" | "fdr" => Adversary::FalseDiscovery { mu },
            "parity_regularizer" => Adversary::ParityRegularizer { mu },
            other => return Err(Error::Config(format!("unknown adversary `{other}`"))),
        };
        adv.validate()?;
        Ok(adv)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Adversary::StatisticalParity { .. } => "statistical_parity",
            Adversary::FalseDiscovery { .. } => "false_discovery",
            Adversary::ParityRegularizer { .. } => "parity_regularizer",
        }
    }

    pub fn mu(&self) -> f64 {
        match *self {
            Adversary::StatisticalParity { mu, .. }
            | Adversary::FalseDiscovery { mu }
            | Adversary::ParityRegularizer { mu } => mu,
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            Adversary::StatisticalParity { degree, .. } => degree,
            _ => 0,
        }
    }

    /// Dimension of `u`.
    pub fn param_dim(&self) -> usize {
        match *self {
            Adversary::StatisticalParity { degree, .. } => degree + 1,
            Adversary::FalseDiscovery { .. } => 3,
            Adversary::ParityRegularizer { .. } => 0,
        }
    }

    pub fn metric(&self) -> FairnessMetric {
        match self {
            Adversary::FalseDiscovery { .. } => FairnessMetric::FalseDiscoveryRate,
            _ => FairnessMetric::StatisticalRate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Adversary::StatisticalParity { degree: 0, .. } = self {
            return Err(Error::Config("adversary degree must be at least 1".into()));
        }
        let mu = self.mu();
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!("mu must be a finite non-negative number, got {mu}")));
        }
        Ok(())
    }
}

/// Classifier loss settings together with the adversary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub adversary: Adversary,
    /// `λ` in `L_C(w) = log-loss + (λ/2)‖w‖²`.
    pub ridge: f64,
}

impl Model {
    pub fn new(adversary: Adversary, ridge: f64) -> Self {
        Model { adversary, ridge }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::Config(format!("ridge must be a finite non-negative number, got {}", self.ridge)));
        }
        self.adversary.validate()
    }
}

impl Default for Model {
    fn default() -> Self {
        Adversary::default().into()
    }
}

impl From<Adversary> for Model {
    fn from(adversary: Adversary) -> Self {
        Model {
            adversary,
            ridge: DEFAULT_RIDGE,
        }
    }
}

/// Classifier weights `w` (length `n + 1`) and adversary weights `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub w: Vec<f64>,
    pub u: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(adversary: &Adversary, data: &AugmentedDataset) -> Self {
        ModelParams {
            w: vec![0.0; data.dim()],
            u: vec![0.0; adversary.param_dim()],
        }
    }

    pub fn check(&self, adversary: &Adversary, data: &AugmentedDataset) -> Result<()> {
        check_dim(data.dim(), self.w.len())?;
        check_dim(adversary.param_dim(), self.u.len())
    }

    pub fn is_finite(&self) -> bool {
        self.w.iter().chain(&self.u).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossGradients {
    pub grad_w_lc: Vec<f64>,
    pub grad_w_lf: Vec<f64>,
    pub grad_u_lf: Vec<f64>,
}

/// Loss values, gradients and classifier probabilities at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub classification_loss: f64,
    pub adversary_loss: f64,
    pub gradients: LossGradients,
    pub probabilities: Vec<f64>,
}

/// Classifier scores `s_i = wᵀx̂_i`.
pub fn scores(w: &[f64], data: &AugmentedDataset) -> Result<Vec<f64>> {
    check_dim(data.dim(), w.len())?;
    Ok(data.rows().map(|x| dot(w, x)).collect())
}

pub fn classify_soft(w: &[f64], data: &AugmentedDataset) -> Result<Vec<f64>> {
    Ok(scores(w, data)?.into_iter().map(sigmoid).collect())
}

/// `log-loss(σ(wᵀx̂), y) + (λ/2)‖w‖²`.
pub fn classification_loss(w: &[f64], ridge: f64, data: &AugmentedDataset) -> Result<f64> {
    let p = classify_soft(w, data)?;
    Ok(log_loss(&p, data.labels())? + 0.5 * ridge * norm_sq(w))
}

/// `Σ_{G_0} v_i / P[G_0] - Σ_{G_1} v_i / P[G_1]`.
fn group_weighted_difference(values: &[f64], data: &AugmentedDataset) -> f64 {
    let p0 = data.group_probability(0);
    let p1 = data.group_probability(1);
    let s0: f64 = data.group(0).iter().map(|&i| values[i]).sum();
    let s1: f64 = data.group(1).iter().map(|&i| values[i]).sum();
    s0 / p0 - s1 / p1
}

/// Sums of `s` over the four index sets of the false-discovery penalty,
/// returned as `(y=0 ∧ z=1, z=0, y=0 ∧ z=0, z=1)`.
fn fdr_sums(s: &[f64], data: &AugmentedDataset) -> (f64, f64, f64, f64) {
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for (i, (&y, &z)) in data.labels().iter().zip(data.sensitive()).enumerate() {
        if z == 0 {
            b += s[i];
            if y == 0 {
                c += s[i];
            }
        } else {
            d += s[i];
            if y == 0 {
                a += s[i];
            }
        }
    }
    (a, b, c, d)
}

fn polynomial_features(s: f64, degree: usize) -> impl Iterator<Item = f64> {
    std::iter::successors(Some(1.0), move |p| Some(p * s)).take(degree + 1)
}

pub fn sp_adversary_loss(u: &[f64], mu: f64, w: &[f64], data: &AugmentedDataset) -> Result<f64> {
    if u.len() < 2 {
        return Err(Error::dim(3, u.len()));
    }
    let s = scores(w, data)?;
    let degree = u.len() - 1;
    let g: Vec<f64> = s
        .iter()
        .map(|&si| sigmoid(dot(u, &polynomial_features(si, degree).collect::<Vec<_>>())))
        .collect();
    let penalty = group_weighted_difference(&s, data);
    Ok(-log_loss(&g, data.sensitive())? - 0.5 * mu * penalty * penalty)
}

pub fn fdr_adversary_loss(u: &[f64], mu: f64, w: &[f64], data: &AugmentedDataset) -> Result<f64> {
    check_dim(3, u.len())?;
    let s = scores(w, data)?;
    let g: Vec<f64> = s
        .iter()
        .zip(data.labels())
        .map(|(&si, &y)| sigmoid(u[0] + u[1] * sigmoid(si) + u[2] * f64::from(y)))
        .collect();
    let (a, b, c, d) = fdr_sums(&s, data);
    let q = a * b - c * d;
    Ok(-log_loss(&g, data.sensitive())? - 0.5 * mu * q * q)
}

pub fn parity_regularizer_loss(mu: f64, w: &[f64], data: &AugmentedDataset) -> Result<f64> {
    let p = classify_soft(w, data)?;
    let r = group_weighted_difference(&p, data);
    Ok(-0.5 * mu * r * r)
}

pub fn adversary_loss(adv: &Adversary, params: &ModelParams, data: &AugmentedDataset) -> Result<f64> {
    params.check(adv, data)?;
    match *adv {
        Adversary::StatisticalParity { mu, .. } => sp_adversary_loss(&params.u, mu, &params.w, data),
        Adversary::FalseDiscovery { mu } => fdr_adversary_loss(&params.u, mu, &params.w, data),
        Adversary::ParityRegularizer { mu } => parity_regularizer_loss(mu, &params.w, data),
    }
}

pub fn gradients(model: &Model, params: &ModelParams, data: &AugmentedDataset) -> Result<LossGradients> {
    Ok(evaluate(model, params, data)?.gradients)
}

/// Losses and analytic gradients in one pass over the data.
pub fn evaluate(model: &Model, params: &ModelParams, data: &AugmentedDataset) -> Result<Evaluation> {
    let adv = &model.adversary;
    params.check(adv, data)?;
    let ModelParams { w, u } = params;
    let n = data.len() as f64;
    let dim = data.dim();
    let s = scores(w, data)?;
    let f: Vec<f64> = s.iter().map(|&v| sigmoid(v)).collect();
    let y = data.labels();
    let z = data.sensitive();

    let mut grad_w_lc: Vec<f64> = w.iter().map(|v| model.ridge * v).collect();
    for (i, x) in data.rows().enumerate() {
        crate::math::axpy((f[i] - f64::from(y[i])) / n, x, &mut grad_w_lc);
    }
    let classification_loss = log_loss(&f, y)? + 0.5 * model.ridge * norm_sq(w);

    let mut grad_w_lf = vec![0.0; dim];
    let mut grad_u_lf = vec![0.0; u.len()];
    let adversary_loss = match *adv {
        Adversary::StatisticalParity { degree, mu } => {
            let mut g = Vec::with_capacity(s.len());
            for (i, x) in data.rows().enumerate() {
                let phi: Vec<f64> = polynomial_features(s[i], degree).collect();
                let gi = sigmoid(dot(u, &phi));
                let resid = gi - f64::from(z[i]);
                crate::math::axpy(-resid / n, &phi, &mut grad_u_lf);
                // d(uᵀφ)/ds = Σ_k k u_k s^{k-1}
                let dads: f64 = (1..=degree).map(|k| k as f64 * u[k] * phi[k - 1]).sum();
                crate::math::axpy(-resid * dads / n, x, &mut grad_w_lf);
                g.push(gi);
            }
            let r = group_weighted_difference(&s, data);
            let dr = group_weighted_row_difference(data, |_| 1.0);
            crate::math::axpy(-mu * r, &dr, &mut grad_w_lf);
            -log_loss(&g, z)? - 0.5 * mu * r * r
        }
        Adversary::FalseDiscovery { mu } => {
            let mut g = Vec::with_capacity(s.len());
            for (i, x) in data.rows().enumerate() {
                let v = [1.0, f[i], f64::from(y[i])];
                let gi = sigmoid(dot(u, &v));
                let resid = gi - f64::from(z[i]);
                crate::math::axpy(-resid / n, &v, &mut grad_u_lf);
                crate::math::axpy(-resid * u[1] * f[i] * (1.0 - f[i]) / n, x, &mut grad_w_lf);
                g.push(gi);
            }
            let (a, b, c, d) = fdr_sums(&s, data);
            let q = a * b - c * d;
            // ∇q = b∇a + a∇b - d∇c - c∇d, with ∇ of each sum the sum of its rows.
            let mut dq = vec![0.0; dim];
            for (i, x) in data.rows().enumerate() {
                let coef = if z[i] == 0 {
                    a - if y[i] == 0 { d } else { 0.0 }
                } else {
                    -c + if y[i] == 0 { b } else { 0.0 }
                };
                crate::math::axpy(coef, x, &mut dq);
            }
            crate::math::axpy(-mu * q, &dq, &mut grad_w_lf);
            -log_loss(&g, z)? - 0.5 * mu * q * q
        }
        Adversary::ParityRegularizer { mu } => {
            let r = group_weighted_difference(&f, data);
            let dr = group_weighted_row_difference(data, |i| f[i] * (1.0 - f[i]));
            crate::math::axpy(-mu * r, &dr, &mut grad_w_lf);
            -0.5 * mu * r * r
        }
    };

    Ok(Evaluation {
        classification_loss,
        adversary_loss,
        gradients: LossGradients {
            grad_w_lc,
            grad_w_lf,
            grad_u_lf,
        },
        probabilities: f,
    })
}

/// `Σ_{G_0} c_i x̂_i / P[G_0] - Σ_{G_1} c_i x̂_i / P[G_1]`.
fn group_weighted_row_difference(data: &AugmentedDataset, coef: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; data.dim()];
    for (j, sign) in [(0usize, 1.0), (1, -1.0)] {
        let scale = sign / data.group_probability(j);
        for &i in data.group(j) {
            crate::math::axpy(scale * coef(i), data.row(i), &mut out);
        }
    }
    out
}
