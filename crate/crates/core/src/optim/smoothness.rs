use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{norm, sub};

/// Multiplier applied to the largest observed gradient-difference ratio.
pub const SMOOTHNESS_SAFETY: f64 = 1.5;
/// Estimates are clamped from below to stay strictly positive.
pub const SMOOTHNESS_FLOOR: f64 = 1e-12;

/// Empirical Lipschitz constant of `gradient`:
/// `1.5 · max ‖∇f(a) - ∇f(b)‖ / ‖a - b‖` over all pairs of `sample_points`
/// points drawn uniformly from the box `center ± radius`.
pub fn estimate_smoothness<G>(
    gradient: G,
    center: &[f64],
    radius: f64,
    sample_points: usize,
    seed: u64,
) -> Result<f64>
where
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if sample_points < 2 {
        return Err(Error::Precondition(format!(
            "smoothness estimation needs at least 2 points, got {sample_points}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(sample_points);
    let mut grads = Vec::with_capacity(sample_points);
    for _ in 0..sample_points {
        let x: Vec<f64> = center
            .iter()
            .map(|c| c + radius * (2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        grads.push(gradient(&x)?);
        points.push(x);
    }
    let mut best = 0.0f64;
    for i in 0..sample_points {
        for j in (i + 1)..sample_points {
            let dx = norm(&sub(&points[i], &points[j]));
            if dx > 0.0 {
                best = best.max(norm(&sub(&grads[i], &grads[j])) / dx);
            }
        }
    }
    if !best.is_finite() {
        return Err(Error::NonFinite("gradient difference ratio".into()));
    }
    Ok((SMOOTHNESS_SAFETY * best).max(SMOOTHNESS_FLOOR))
}
