//! Scalar and vector primitives shared by the models and optimizers.
//!
//! Vectors are plain `f64` slices. Every reduction runs sequentially in index
//! order, so results are bit-reproducible across runs and thread counts.

use crate::error::{check_dim, Error, Result};

/// Probabilities are clamped into `[LOG_CLIP, 1 - LOG_CLIP]` before taking logs.
pub const LOG_CLIP: f64 = 1e-12;

/// Below this norm a projection target is treated as the zero vector.
pub const PROJECTION_EPS: f64 = 1e-12;

/// Logistic function, evaluated on the branch that cannot overflow.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Derivative of [`sigmoid`], `σ(z)(1 - σ(z))`.
#[inline]
pub fn sigmoid_prime(z: f64) -> f64 {
    let s = sigmoid(z);
    s * (1.0 - s)
}

/// Mean negative log-likelihood of binary `labels` under `predictions`.
///
/// Predictions are clipped into `[LOG_CLIP, 1 - LOG_CLIP]` first so the result
/// is always finite.
pub fn log_loss(predictions: &[f64], labels: &[u8]) -> Result<f64> {
    check_dim(predictions.len(), labels.len())?;
    if predictions.is_empty() {
        return Err(Error::Precondition("log-loss of an empty sample".into()));
    }
    let mut total = 0.0;
    for (&p, &y) in predictions.iter().zip(labels) {
        let p = p.clamp(LOG_CLIP, 1.0 - LOG_CLIP);
        total += if y == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(-total / predictions.len() as f64)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `y += a * x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Projection of `u` onto the line spanned by `v`: `<u,v>/<v,v> * v`.
///
/// Returns the zero vector when `‖v‖ < PROJECTION_EPS`.
pub fn project(u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_dim(v.len(), u.len())?;
    let vv = norm_sq(v);
    if vv.sqrt() < PROJECTION_EPS {
        return Ok(vec![0.0; u.len()]);
    }
    Ok(scaled(v, dot(u, v) / vv))
}

/// Centered Pearson correlation coefficient of two equal-length vectors.
pub fn pearson_correlation(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dim(u.len(), v.len())?;
    if u.len() < 2 {
        return Err(Error::Precondition(
            "correlation needs at least two observations".into(),
        ));
    }
    let n = u.len() as f64;
    let mean_u = u.iter().sum::<f64>() / n;
    let mean_v = v.iter().sum::<f64>() / n;
    let (mut suv, mut suu, mut svv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let du = a - mean_u;
        let dv = b - mean_v;
        suv += du * dv;
        suu += du * du;
        svv += dv * dv;
    }
    if suu == 0.0 {
        return Err(Error::DegenerateVariance("u"));
    }
    if svv == 0.0 {
        return Err(Error::DegenerateVariance("v"));
    }
    Ok((suv / (suu.sqrt() * svv.sqrt())).clamp(-1.0, 1.0))
}

/// Central-difference gradient `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn finite_diff_gradient<F>(f: F, at: &[f64], step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Precondition(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let mut x = at.to_vec();
    let mut grad = Vec::with_capacity(at.len());
    for i in 0..at.len() {
        x[i] = at[i] + step;
        let plus = f(&x);
        x[i] = at[i] - step;
        let minus = f(&x);
        x[i] = at[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite(format!(
                "objective evaluation along coordinate {i}"
            )));
        }
        grad.push((plus - minus) / (2.0 * step));
    }
    Ok(grad)
}
