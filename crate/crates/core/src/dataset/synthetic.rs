//! Correlation-controlled relabeling and a census-like base population.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{Error, Result};
use crate::math::{pearson_correlation, sigmoid};

/// Acceptable distance between requested and measured correlation.
pub const CORRELATION_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub dataset: Dataset,
    /// Measured with [`pearson_correlation`] on the final labels.
    pub correlation: f64,
    pub flips: usize,
}

/// Pearson correlation of two binary vectors.
pub fn binary_correlation(a: &[u8], b: &[u8]) -> Result<f64> {
    let a: Vec<f64> = a.iter().map(|&v| f64::from(v)).collect();
    let b: Vec<f64> = b.iter().map(|&v| f64::from(v)).collect();
    pearson_correlation(&a, &b)
}

/// Running label/sensitive correlation from 2x2 contingency counts.
struct CountCorrelation {
    n: f64,
    sum_y: f64,
    sum_z: f64,
    sum_yz: f64,
}

impl CountCorrelation {
    fn new(y: &[u8], z: &[u8]) -> Self {
        let mut c = CountCorrelation {
            n: y.len() as f64,
            sum_y: 0.0,
            sum_z: 0.0,
            sum_yz: 0.0,
        };
        for (&yi, &zi) in y.iter().zip(z) {
            c.sum_y += f64::from(yi);
            c.sum_z += f64::from(zi);
            c.sum_yz += f64::from(yi & zi);
        }
        c
    }

    fn value(&self) -> f64 {
        let cov = self.n * self.sum_yz - self.sum_y * self.sum_z;
        let var_y = self.n * self.sum_y - self.sum_y * self.sum_y;
        let var_z = self.n * self.sum_z - self.sum_z * self.sum_z;
        if var_y <= 0.0 || var_z <= 0.0 {
            return 0.0;
        }
        cov / (var_y.sqrt() * var_z.sqrt())
    }

    /// Account for `y_i` being set to `z_i` where they differed.
    fn flip_toward(&mut self, z: u8) {
        if z == 1 {
            self.sum_y += 1.0;
            self.sum_yz += 1.0;
        } else {
            self.sum_y -= 1.0;
        }
    }
}

/// Raises the label/sensitive correlation of `base` to `target_corr`.
///
/// Visits the indices with `y_i != z_i` in a seeded random order and sets
/// `y_i <- z_i` one at a time until the correlation reaches the target.
/// Features and sensitive attributes are untouched.
pub fn make_synthetic(base: &Dataset, target_corr: f64, seed: u64) -> Result<SyntheticDataset> {
    if !(target_corr > 0.0 && target_corr <= 1.0) {
        return Err(Error::Precondition(format!(
            "target correlation must lie in (0, 1], got {target_corr}"
        )));
    }
    let z = base.sensitive();
    let mut y = base.labels().to_vec();
    let start = binary_correlation(&y, z)?;
    if start > target_corr + CORRELATION_TOLERANCE {
        return Err(Error::Precondition(format!(
            "base correlation {start:.4} already exceeds target {target_corr}"
        )));
    }

    let mut candidates: Vec<usize> = (0..y.len()).filter(|&i| y[i] != z[i]).collect();
    candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut running = CountCorrelation::new(&y, z);
    let mut flips = 0;
    for &i in &candidates {
        if running.value() >= target_corr - 1e-12 {
            break;
        }
        y[i] = z[i];
        running.flip_toward(z[i]);
        flips += 1;
    }

    let correlation = binary_correlation(&y, z)?;
    if (correlation - target_corr).abs() > CORRELATION_TOLERANCE && flips > 0 {
        return Err(Error::Precondition(format!(
            "dataset too small to hit correlation {target_corr} (reached {correlation:.4})"
        )));
    }
    Ok(SyntheticDataset {
        dataset: base.with_labels(y)?,
        correlation,
        flips,
    })
}

/// Census-like base population with nine features scaled into `[0, 1]`.
///
/// Roughly two thirds of the samples have `z = 1`. As in census extracts the
/// sensitive attribute itself is a feature (`sex`), and `hours`, `married`
/// and `manager` also depend on it. The income-style label is
/// drawn from a logistic model of the features, giving a label/sensitive
/// correlation near 0.2 and a positive rate near one quarter.
pub fn adult_like(n_samples: usize, seed: u64) -> Result<Dataset> {
    const NAMES: [&str; 9] = [
        "age", "education", "hours", "married", "capital", "manager", "tenure", "urban", "sex",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = |rng: &mut ChaCha8Rng, mean: f64, sd: f64| {
        // Box-Muller, one draw per call keeps the stream layout simple.
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (mean + sd * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()).clamp(0.0, 1.0)
    };
    let bern = |rng: &mut ChaCha8Rng, p: f64| u8::from(rng.gen::<f64>() < p);

    let mut rows = Vec::with_capacity(n_samples);
    let mut labels = Vec::with_capacity(n_samples);
    let mut sensitive = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let z = bern(&mut rng, 0.67);
        let zf = f64::from(z);
        let age = gauss(&mut rng, 0.42 + 0.04 * zf, 0.16);
        let education = gauss(&mut rng, 0.55, 0.17);
        let hours = gauss(&mut rng, 0.38 + 0.10 * zf, 0.12);
        let married = f64::from(bern(&mut rng, 0.20 + 0.45 * zf));
        let capital = f64::from(bern(&mut rng, 0.07)) * rng.gen::<f64>();
        let manager = f64::from(bern(&mut rng, 0.09 + 0.06 * zf));
        let tenure = gauss(&mut rng, 0.5, 0.2);
        let urban = f64::from(bern(&mut rng, 0.5));
        let logit = -6.2
            + 2.2 * age
            + 3.0 * education
            + 1.8 * hours
            + 1.9 * married
            + 4.0 * capital
            + 1.0 * manager
            + 0.2 * tenure;
        let y = bern(&mut rng, sigmoid(logit));
        rows.push(vec![age, education, hours, married, capital, manager, tenure, urban, zf]);
        labels.push(y);
        sensitive.push(z);
    }

    let n = NAMES.len();
    let mut features = Vec::with_capacity(n_samples * n);
    for row in &rows {
        features.extend_from_slice(row);
    }
    for j in 0..n {
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[j]), hi.max(r[j])));
        for i in 0..n_samples {
            let v = &mut features[i * n + j];
            *v = if hi > lo { (*v - lo) / (hi - lo) } else { 0.0 };
        }
    }
    Dataset::with_names(
        features,
        NAMES.iter().map(|s| s.to_string()).collect(),
        labels,
        sensitive,
    )
}
