use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::ModelParams;

pub const TRACE_COLUMNS: [&str; 9] = [
    "t",
    "L_C",
    "L_F",
    "acc",
    "fairness",
    "identity_residual",
    "grad_norm_F",
    "grad_norm_C",
    "alpha",
];

/// One training iteration, measured at the iterate produced by that iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub classification_loss: f64,
    pub adversary_loss: f64,
    pub accuracy: f64,
    /// Statistical rate or false discovery rate, per the adversary. `None`
    /// when the false discovery rate is undefined.
    pub fairness: Option<f64>,
    /// `⟨∇_w L_F, g⟩ + α ‖∇_w L_F‖²` for the direction `g` actually taken.
    pub identity_residual: f64,
    pub grad_norm_f: f64,
    pub grad_norm_c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingTrace {
    pub records: Vec<TraceRecord>,
    /// Reported iterate after each record (`q_t` for the accelerated method).
    pub iterates: Vec<ModelParams>,
    /// Mean predicted probability per sensitive group at each record.
    pub soft_group_means: Vec<[f64; 2]>,
    /// `‖g - ∇_w L_C‖`, the deviation of the step from plain descent.
    pub deviation_norms: Vec<f64>,
}

impl TrainingTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// First iteration whose recorded fairness reaches `tau`.
    pub fn first_reaching(&self, tau: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.fairness.is_some_and(|f| f >= tau))
            .map(|r| r.t)
    }

    pub fn to_csv(&self) -> String {
        let mut out = TRACE_COLUMNS.join(",");
        out.push('\n');
        for r in &self.records {
            let fairness = r.fairness.map_or_else(|| "NA".to_string(), |f| f.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.t,
                r.classification_loss,
                r.adversary_loss,
                r.accuracy,
                fairness,
                r.identity_residual,
                r.grad_norm_f,
                r.grad_norm_c,
                r.alpha
            );
        }
        out
    }
}

pub fn write_trace(trace: &TrainingTrace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, trace.to_csv()).map_err(|e| Error::io(path, e))
}

/// Parses a trace CSV back into records (iterates are not persisted).
pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let path = path.as_ref();
    let bad = |message: String| Error::Format {
        kind: "trace",
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if headers != TRACE_COLUMNS {
        return Err(bad(format!("unexpected header {headers:?}")));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let num = |i: usize| -> Result<f64> {
            row[i]
                .parse()
                .map_err(|_| bad(format!("column {} value `{}`", TRACE_COLUMNS[i], &row[i])))
        };
        records.push(TraceRecord {
            t: row[0].parse().map_err(|_| bad(format!("bad iteration `{}`", &row[0])))?,
            classification_loss: num(1)?,
            adversary_loss: num(2)?,
            accuracy: num(3)?,
            fairness: if &row[4] == "NA" { None } else { Some(num(4)?) },
            identity_residual: num(5)?,
            grad_norm_f: num(6)?,
            grad_norm_c: num(7)?,
            alpha: num(8)?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let trace = TrainingTrace {
            records: vec![
                TraceRecord {
                    t: 1,
                    classification_loss: 0.1 + 0.2,
                    adversary_loss: -1e7 / 3.0,
                    accuracy: 0.75,
                    fairness: None,
                    identity_residual: -1.5e-17,
                    grad_norm_f: 0.0,
                    grad_norm_c: 2.0f64.sqrt(),
                    alpha: 0.1,
                },
                TraceRecord {
                    t: 2,
                    classification_loss: 0.5,
                    adversary_loss: -0.69,
                    accuracy: 1.0,
                    fairness: Some(0.8125),
                    identity_residual: 0.0,
                    grad_norm_f: 1.0,
                    grad_norm_c: 1.0,
                    alpha: 0.1 / 2f64.sqrt(),
                },
            ],
            ..Default::default()
        };
        let f = tempfile::NamedTempFile::new().unwrap();
        write_trace(&trace, f.path()).unwrap();
        assert_eq!(read_trace(f.path()).unwrap(), trace.records);
        assert_eq!(trace.first_reaching(0.8), Some(2));
        assert_eq!(trace.first_reaching(0.9), None);
    }
}
