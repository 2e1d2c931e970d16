use std::collections::BTreeSet;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};

/// Column-role map for [`load_csv`].
///
/// Columns not named as label, sensitive or dropped become features. A feature
/// column is numeric when every value parses as a number (or when it is listed
/// in `numeric`); otherwise it is one-hot encoded with levels in sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub label: String,
    /// Value mapped to 1. When `None`, label values must already be 0 or 1.
    pub label_positive: Option<String>,
    pub sensitive: String,
    pub sensitive_positive: Option<String>,
    pub drop: Vec<String>,
    pub categorical: Vec<String>,
    pub numeric: Vec<String>,
    /// Every feature not marked categorical must be numeric.
    pub all_numeric: bool,
    /// Min-max scale numeric features into `[0, 1]`.
    pub scale: bool,
    /// Also encode the sensitive column as a feature.
    pub sensitive_as_feature: bool,
}

impl Schema {
    pub fn new(label: impl Into<String>, sensitive: impl Into<String>) -> Self {
        Schema {
            label: label.into(),
            label_positive: None,
            sensitive: sensitive.into(),
            sensitive_positive: None,
            drop: Vec::new(),
            categorical: Vec::new(),
            numeric: Vec::new(),
            all_numeric: false,
            scale: true,
            sensitive_as_feature: false,
        }
    }

    /// Schema of the dataset cache format: `x_1..x_n, y, z`, no rescaling.
    pub fn identity() -> Self {
        Schema {
            all_numeric: true,
            scale: false,
            ..Schema::new("y", "z")
        }
    }
}

fn is_missing(v: &str) -> bool {
    v.is_empty() || v == "?"
}

fn binary_value(raw: &str, positive: Option<&str>, row: usize, column: &str) -> Result<u8> {
    if let Some(pos) = positive {
        return Ok(u8::from(raw == pos));
    }
    match raw.parse::<f64>() {
        Ok(0.0) => Ok(0),
        Ok(1.0) => Ok(1),
        _ => Err(Error::Ingest {
            row,
            column: column.to_string(),
            message: format!("expected a binary value 0 or 1, found `{raw}`"),
        }),
    }
}

/// Reads a headed CSV file into a [`Dataset`].
///
/// Rows with an empty or `?` cell in any used column are rejected. Row numbers
/// in errors are file line numbers (the header is line 1).
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Ingest {
            row: 1,
            column: name.to_string(),
            message: "column not found in header".into(),
        })
    };
    let label_col = find(&schema.label)?;
    let sensitive_col = find(&schema.sensitive)?;
    for name in schema.drop.iter().chain(&schema.categorical).chain(&schema.numeric) {
        find(name)?;
    }
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| c != label_col && (c != sensitive_col || schema.sensitive_as_feature))
        .filter(|&c| !schema.drop.contains(&headers[c]))
        .collect();

    let mut lines = Vec::new();
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            Error::Ingest {
                row,
                column: String::new(),
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let used = feature_cols.iter().chain([&label_col, &sensitive_col]);
        if used.into_iter().any(|&c| is_missing(&record[c])) {
            continue;
        }
        lines.push(line);
        records.push(record);
    }

    let mut labels = Vec::with_capacity(records.len());
    let mut sensitive = Vec::with_capacity(records.len());
    for (rec, &line) in records.iter().zip(&lines) {
        labels.push(binary_value(
            &rec[label_col],
            schema.label_positive.as_deref(),
            line,
            &schema.label,
        )?);
        sensitive.push(binary_value(
            &rec[sensitive_col],
            schema.sensitive_positive.as_deref(),
            line,
            &schema.sensitive,
        )?);
    }

    // Encoded columns, each a full-length vector.
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut names = Vec::new();
    for &c in &feature_cols {
        let name = &headers[c];
        let forced_categorical = schema.categorical.contains(name);
        let forced_numeric = !forced_categorical && (schema.all_numeric || schema.numeric.contains(name));
        let parsed: Vec<Option<f64>> = records
            .iter()
            .map(|r| r[c].parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        if forced_numeric {
            if let Some(i) = parsed.iter().position(Option::is_none) {
                return Err(Error::Ingest {
                    row: lines[i],
                    column: name.clone(),
                    message: format!("cannot parse `{}` as a number", &records[i][c]),
                });
            }
        }
        let numeric = !forced_categorical && parsed.iter().all(Option::is_some);
        if numeric {
            let mut values: Vec<f64> = parsed.into_iter().map(|v| v.unwrap_or_default()).collect();
            if schema.scale {
                min_max_scale(&mut values);
            }
            columns.push(values);
            names.push(name.clone());
        } else {
            let levels: BTreeSet<&str> = records.iter().map(|r| &r[c]).collect();
            for level in levels {
                columns.push(
                    records
                        .iter()
                        .map(|r| if &r[c] == level { 1.0 } else { 0.0 })
                        .collect(),
                );
                names.push(format!("{name}={level}"));
            }
        }
    }

    let n = records.len();
    let mut features = Vec::with_capacity(n * columns.len());
    for i in 0..n {
        features.extend(columns.iter().map(|col| col[i]));
    }
    Dataset::with_names(features, names, labels, sensitive)
}

fn min_max_scale(values: &mut [f64]) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    for v in values.iter_mut() {
        *v = if range > 0.0 { (*v - lo) / range } else { 0.0 };
    }
}

/// Writes `x_1..x_n, y, z` with shortest round-trip decimal formatting, so
/// [`read_cache`] reproduces the dataset bit for bit.
pub fn write_cache(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for j in 1..=data.n_features() {
        out.push_str(&format!("x_{j},"));
    }
    out.push_str("y,z\n");
    for i in 0..data.len() {
        for v in data.row(i) {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{},{}\n", data.labels()[i], data.sensitive()[i]));
    }
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_cache(path: impl AsRef<Path>) -> Result<Dataset> {
    let data = load_csv(path, &Schema::identity())?;
    let n = data.n_features();
    Dataset::new(data.features().to_vec(), n, data.labels().to_vec(), data.sensitive().to_vec())
}
