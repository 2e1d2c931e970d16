//! Accuracy and group-fairness metrics over hard 0/1 decisions.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{check_dim, Error, Result};
use crate::models::FairnessMetric;

/// Decision threshold applied to `σ(wᵀx̂)`.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardPredictions(Vec<u8>);

impl HardPredictions {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Precondition(format!("prediction {bad} is not binary")));
        }
        Ok(HardPredictions(bits))
    }

    /// 1 where the probability is at least [`DECISION_THRESHOLD`].
    pub fn from_probabilities(probs: &[f64]) -> Self {
        HardPredictions(probs.iter().map(|&p| u8::from(p >= DECISION_THRESHOLD)).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Ratio-of-rates reduction shared by both parity metrics:
/// `min(a/b, b/a)` with `0/0 -> 1` and `p/0 -> 0`.
fn min_ratio(a: f64, b: f64) -> f64 {
    match (a == 0.0, b == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => (a / b).min(b / a),
    }
}

/// `P[f = 1 | G_j]` for both groups.
pub fn positive_rates(pred: &HardPredictions, data: &Dataset) -> Result<[f64; 2]> {
    check_dim(data.len(), pred.len())?;
    let mut rates = [0.0; 2];
    for (j, rate) in rates.iter_mut().enumerate() {
        let group = data.group(j);
        if group.is_empty() {
            return Err(Error::Metric(format!("group G_{j} is empty")));
        }
        let positives = group.iter().filter(|&&i| pred.0[i] == 1).count();
        *rate = positives as f64 / group.len() as f64;
    }
    Ok(rates)
}

/// Statistical rate: the smaller of the two ratios of group positive rates.
pub fn statistical_rate(pred: &HardPredictions, data: &Dataset) -> Result<f64> {
    let [r0, r1] = positive_rates(pred, data)?;
    Ok(min_ratio(r1, r0))
}

/// False discovery rate in the parity sense: the smaller ratio of
/// `P[y = 0 | f = 1, G_j]` across groups.
///
/// `None` when either group receives no positive prediction, since the
/// conditional probability is then undefined.
pub fn false_discovery_rate(pred: &HardPredictions, data: &Dataset) -> Result<Option<f64>> {
    check_dim(data.len(), pred.len())?;
    let mut shares = [0.0; 2];
    for (j, share) in shares.iter_mut().enumerate() {
        let (mut positives, mut false_positives) = (0usize, 0usize);
        for &i in data.group(j) {
            if pred.0[i] == 1 {
                positives += 1;
                if data.labels()[i] == 0 {
                    false_positives += 1;
                }
            }
        }
        if positives == 0 {
            return Ok(None);
        }
        *share = false_positives as f64 / positives as f64;
    }
    Ok(Some(min_ratio(shares[1], shares[0])))
}

pub fn accuracy(pred: &HardPredictions, data: &Dataset) -> Result<f64> {
    check_dim(data.len(), pred.len())?;
    let correct = pred
        .0
        .iter()
        .zip(data.labels())
        .filter(|(p, y)| p == y)
        .count();
    Ok(correct as f64 / data.len() as f64)
}

/// `|w_η| / max_i |w_i|` where `w_η` is the trailing (bias or noise) weight
/// and the maximum runs over the remaining weights.
///
/// Returns `f64::INFINITY` when every other weight is zero.
pub fn noise_weight_ratio(w: &[f64]) -> Result<f64> {
    if w.len() < 2 {
        return Err(Error::Precondition(format!(
            "noise weight ratio needs at least 2 weights, got {}",
            w.len()
        )));
    }
    let (rest, last) = w.split_at(w.len() - 1);
    let denom = rest.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(if denom == 0.0 {
        f64::INFINITY
    } else {
        last[0].abs() / denom
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub statistical_rate: f64,
    /// `None` when undefined.
    pub false_discovery_rate: Option<f64>,
    pub positive_rate_per_group: [f64; 2],
    /// Mean predicted probability per group.
    pub soft_mean_per_group: [f64; 2],
}

impl MetricReport {
    pub fn compute(probabilities: &[f64], data: &Dataset) -> Result<Self> {
        let pred = HardPredictions::from_probabilities(probabilities);
        let mut soft = [0.0; 2];
        for (j, s) in soft.iter_mut().enumerate() {
            let g = data.group(j);
            *s = g.iter().map(|&i| probabilities[i]).sum::<f64>() / g.len() as f64;
        }
        Ok(MetricReport {
            accuracy: accuracy(&pred, data)?,
            statistical_rate: statistical_rate(&pred, data)?,
            false_discovery_rate: false_discovery_rate(&pred, data)?,
            positive_rate_per_group: positive_rates(&pred, data)?,
            soft_mean_per_group: soft,
        })
    }

    /// Value of `metric`; `None` only for an undefined false discovery rate.
    pub fn fairness(&self, metric: FairnessMetric) -> Option<f64> {
        match metric {
            FairnessMetric::StatisticalRate => Some(self.statistical_rate),
            FairnessMetric::FalseDiscoveryRate => self.false_discovery_rate,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(y: &[u8], z: &[u8]) -> Dataset {
        let rows: Vec<Vec<f64>> = y.iter().map(|_| vec![0.0]).collect();
        Dataset::from_rows(&rows, y.to_vec(), z.to_vec()).unwrap()
    }

    fn pred(bits: &[u8]) -> HardPredictions {
        HardPredictions::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn statistical_rate_examples() {
        let d = data(&[0, 1, 0, 1], &[0, 0, 1, 1]);
        assert_eq!(statistical_rate(&pred(&[1, 1, 1, 1]), &d).unwrap(), 1.0);
        assert_eq!(statistical_rate(&pred(&[0, 0, 0, 0]), &d).unwrap(), 1.0);
        assert_eq!(statistical_rate(&pred(&[1, 0, 1, 1]), &d).unwrap(), 0.5);
        assert_eq!(statistical_rate(&pred(&[1, 0, 0, 0]), &d).unwrap(), 0.0);
        assert!(statistical_rate(&pred(&[1, 0, 0]), &d).is_err());
    }

    #[test]
    fn false_discovery_examples() {
        let d = data(&[0, 1, 0, 1], &[0, 0, 1, 1]);
        assert_eq!(false_discovery_rate(&pred(&[1, 1, 1, 1]), &d).unwrap(), Some(1.0));
        assert_eq!(false_discovery_rate(&pred(&[1, 1, 0, 0]), &d).unwrap(), None);
        let twin = data(&[0, 1, 1, 0, 1, 1], &[0, 0, 0, 1, 1, 1]);
        assert_eq!(
            false_discovery_rate(&pred(&[1, 1, 0, 1, 1, 0]), &twin).unwrap(),
            Some(1.0)
        );
    }

    #[test]
    fn accuracy_examples() {
        let d = data(&[1, 1, 1, 0], &[0, 0, 1, 1]);
        assert_eq!(accuracy(&pred(&[1, 1, 1, 0]), &d).unwrap(), 1.0);
        assert_eq!(accuracy(&pred(&[0, 0, 0, 1]), &d).unwrap(), 0.0);
        assert_eq!(accuracy(&pred(&[1, 0, 1, 1]), &d).unwrap(), 0.5);
    }

    #[test]
    fn noise_weight_ratio_examples() {
        assert_eq!(noise_weight_ratio(&[1.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(noise_weight_ratio(&[1.0, -3.0, 0.0]).unwrap(), 0.0);
        assert_eq!(noise_weight_ratio(&[0.0, 0.0, 5.0]).unwrap(), f64::INFINITY);
        assert_eq!(noise_weight_ratio(&[-1.0, 0.5, -2.0]).unwrap(), 2.0);
        assert!(noise_weight_ratio(&[1.0]).is_err());
    }

    #[test]
    fn threshold_is_inclusive() {
        let p = HardPredictions::from_probabilities(&[0.5, 0.4999, 0.9]);
        assert_eq!(p.bits(), &[1, 0, 1]);
        assert!(HardPredictions::new(vec![0, 2]).is_err());
    }

    #[test]
    fn report_collects_group_means() {
        let d = data(&[0, 1, 0, 1], &[0, 0, 1, 1]);
        let r = MetricReport::compute(&[0.2, 0.8, 0.6, 0.4], &d).unwrap();
        assert_eq!(r.positive_rate_per_group, [0.5, 0.5]);
        assert!((r.soft_mean_per_group[0] - 0.5).abs() < 1e-15);
        assert_eq!(r.statistical_rate, 1.0);
        assert_eq!(r.accuracy, 0.5);
    }
}
