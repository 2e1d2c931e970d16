//! Datasets with a binary label and a binary sensitive attribute.
//!
//! A [`Dataset`] holds the raw feature matrix; training always runs on an
//! [`AugmentedDataset`], which appends either a constant bias column or a
//! per-sample uniform noise column to every feature vector.

mod ingest;
mod synthetic;

pub use ingest::{load_csv, read_cache, write_cache, Schema};
pub use synthetic::{adult_like, binary_correlation, make_synthetic, SyntheticDataset};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    feature_names: Vec<String>,
    labels: Vec<u8>,
    sensitive: Vec<u8>,
    groups: [Vec<usize>; 2],
}

impl Dataset {
    /// Builds a dataset from a row-major `N × n` feature buffer.
    pub fn new(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<u8>,
        sensitive: Vec<u8>,
    ) -> Result<Self> {
        let names = (1..=n_features).map(|i| format!("x_{i}")).collect();
        Self::with_names(features, names, labels, sensitive)
    }

    pub fn with_names(
        features: Vec<f64>,
        feature_names: Vec<String>,
        labels: Vec<u8>,
        sensitive: Vec<u8>,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        let n = labels.len();
        check_dim(n, sensitive.len())?;
        check_dim(n * n_features, features.len())?;
        if n < 2 {
            return Err(Error::Dataset(format!("need at least 2 samples, got {n}")));
        }
        if let Some(bad) = labels.iter().chain(&sensitive).find(|&&v| v > 1) {
            return Err(Error::Dataset(format!("non-binary value {bad}")));
        }
        if !crate::math::all_finite(&features) {
            return Err(Error::Dataset("non-finite feature entry".into()));
        }
        let mut groups = [Vec::new(), Vec::new()];
        for (i, &z) in sensitive.iter().enumerate() {
            groups[z as usize].push(i);
        }
        if groups[0].is_empty() || groups[1].is_empty() {
            return Err(Error::Dataset(format!(
                "both sensitive groups must be non-empty (|G_0| = {}, |G_1| = {})",
                groups[0].len(),
                groups[1].len()
            )));
        }
        Ok(Dataset {
            features,
            n_features,
            feature_names,
            labels,
            sensitive,
            groups,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>, sensitive: Vec<u8>) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for row in rows {
            check_dim(n_features, row.len())?;
            features.extend_from_slice(row);
        }
        Self::new(features, n_features, labels, sensitive)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn sensitive(&self) -> &[u8] {
        &self.sensitive
    }

    /// Indices `G_j = { i : z_i = j }`, in ascending order.
    pub fn group(&self, j: usize) -> &[usize] {
        &self.groups[j]
    }

    /// Empirical `P[G_j] = |G_j| / N`.
    pub fn group_probability(&self, j: usize) -> f64 {
        self.groups[j].len() as f64 / self.len() as f64
    }

    /// Same features and sensitive attributes with replacement labels.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self> {
        check_dim(self.len(), labels.len())?;
        Self::with_names(
            self.features.clone(),
            self.feature_names.clone(),
            labels,
            self.sensitive.clone(),
        )
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        let mut sensitive = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
            sensitive.push(self.sensitive[i]);
        }
        Self::with_names(features, self.feature_names.clone(), labels, sensitive)
    }

    /// Label/sensitive correlation, the difficulty axis of the synthetic sweeps.
    pub fn label_correlation(&self) -> Result<f64> {
        binary_correlation(&self.labels, &self.sensitive)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augmentation {
    /// Constant column of ones.
    Bias,
    /// Uniform `[0, 1)` draws, fixed once per dataset.
    Noise,
}

impl std::str::FromStr for Augmentation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bias" => Ok(Augmentation::Bias),
            "noise" => Ok(Augmentation::Noise),
            other => Err(Error::Config(format!("unknown augmentation `{other}`"))),
        }
    }
}

impl std::fmt::Display for Augmentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Augmentation::Bias => "bias",
            Augmentation::Noise => "noise",
        })
    }
}

/// Dataset whose feature vectors carry one extra trailing column.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDataset {
    base: Dataset,
    augmentation: Augmentation,
    features: Vec<f64>,
    dim: usize,
}

impl AugmentedDataset {
    pub fn base(&self) -> &Dataset {
        &self.base
    }

    pub fn augmentation(&self) -> Augmentation {
        self.augmentation
    }

    /// Augmented width `n + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> &[u8] {
        self.base.labels()
    }

    pub fn sensitive(&self) -> &[u8] {
        self.base.sensitive()
    }

    pub fn group(&self, j: usize) -> &[usize] {
        self.base.group(j)
    }

    pub fn group_probability(&self, j: usize) -> f64 {
        self.base.group_probability(j)
    }

    /// The appended column.
    pub fn extra_column(&self) -> Vec<f64> {
        self.rows().map(|r| r[self.dim - 1]).collect()
    }
}

/// Appends the bias or noise column. Noise is drawn from a generator seeded
/// with `seed`, so the same seed always yields the same column.
pub fn augment(data: &Dataset, mode: Augmentation, seed: u64) -> AugmentedDataset {
    let n = data.n_features();
    let dim = n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(data.len() * dim);
    for i in 0..data.len() {
        features.extend_from_slice(data.row(i));
        features.push(match mode {
            Augmentation::Bias => 1.0,
            Augmentation::Noise => rng.gen::<f64>(),
        });
    }
    AugmentedDataset {
        base: data.clone(),
        augmentation: mode,
        features,
        dim,
    }
}

/// Stratified train/test split over the four `(y, z)` cells.
///
/// Each cell contributes `round(test_fraction * |cell|)` rows to the test part.
/// Both parts must contain both sensitive groups.
pub fn split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for y in 0..2u8 {
        for z in 0..2u8 {
            let mut cell: Vec<usize> = (0..data.len())
                .filter(|&i| data.labels()[i] == y && data.sensitive()[i] == z)
                .collect();
            cell.shuffle(&mut rng);
            let k = (test_fraction * cell.len() as f64).round() as usize;
            test.extend_from_slice(&cell[..k]);
            train.extend_from_slice(&cell[k..]);
        }
    }
    train.sort_unstable();
    test.sort_unstable();
    for (part, name) in [(&train, "train"), (&test, "test")] {
        for j in 0..2u8 {
            if !part.iter().any(|&i| data.sensitive()[i] == j) {
                return Err(Error::Split(format!(
                    "{name} part would contain no sample with z = {j} (N = {})",
                    data.len()
                )));
            }
        }
    }
    Ok((data.subset(&train)?, data.subset(&test)?))
}
