//! Loading point files.
//!
//! Accepted input: CSV or whitespace-delimited numeric columns, an optional
//! final integer label column, and an optional single header line. Label
//! values equal to the noise token (default 0) map to the outlier label 0;
//! the remaining values map to 1..M in order of first appearance.

use std::path::Path;

use crate::datagen::LabeledSample;
use crate::error::{Error, Result};
use crate::linkage::PointSet;

/// Whether to read the final column as ground-truth labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMode {
    /// Use the last column as labels iff every value in it is integral and
    /// there are at least two columns.
    Auto,
    /// The last column must be an integer label column.
    Required,
    /// All columns are coordinates.
    None,
}

/// A loaded dataset: coordinates plus labels when present.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub points: PointSet,
    pub labels: Option<Vec<usize>>,
}

impl LoadedDataset {
    pub fn into_labeled(self) -> Result<LabeledSample> {
        let labels = self
            .labels
            .ok_or_else(|| Error::invalid("dataset has no label column"))?;
        Ok(LabeledSample {
            points: self.points,
            truth: labels,
        })
    }
}

pub fn load_points(path: &Path, mode: LabelMode, noise_label: i64) -> Result<LoadedDataset> {
    let text = std::fs::read_to_string(path)?;
    parse_points(&text, mode, noise_label)
}

pub fn parse_points(text: &str, mode: LabelMode, noise_label: i64) -> Result<LoadedDataset> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    let mut first_data_line = true;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = if trimmed.contains(',') {
            trimmed.split(',').map(str::trim).collect()
        } else {
            trimmed.split_whitespace().collect()
        };
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if first_data_line => {
                // tolerate a single header line
                first_data_line = false;
                continue;
            }
            Err(_) => {
                let bad = fields
                    .iter()
                    .find(|f| f.parse::<f64>().is_err())
                    .unwrap_or(&"");
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-numeric cell '{bad}'"),
                });
            }
        };
        first_data_line = false;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("row has {} columns, expected {w}", row.len()),
                });
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    let width = width.unwrap();

    let last_is_integral = rows.iter().all(|r| {
        let v = *r.last().unwrap();
        v.fract() == 0.0 && v.abs() < 1e15
    });
    let with_labels = match mode {
        LabelMode::None => false,
        LabelMode::Auto => width >= 2 && last_is_integral,
        LabelMode::Required => {
            if width < 2 || !last_is_integral {
                return Err(Error::invalid(
                    "dataset is missing an integer label column",
                ));
            }
            true
        }
    };

    if !with_labels {
        return Ok(LoadedDataset {
            points: PointSet::new(width, rows)?,
            labels: None,
        });
    }

    let mut coords = Vec::with_capacity(rows.len());
    let mut raw_labels = Vec::with_capacity(rows.len());
    for mut row in rows {
        let label = row.pop().unwrap() as i64;
        coords.push(row);
        raw_labels.push(label);
    }
    // map noise → 0, groups → 1..M by first appearance
    let mut mapping: Vec<(i64, usize)> = Vec::new();
    let labels: Vec<usize> = raw_labels
        .iter()
        .map(|&l| {
            if l == noise_label {
                0
            } else if let Some(&(_, m)) = mapping.iter().find(|(raw, _)| *raw == l) {
                m
            } else {
                let m = mapping.len() + 1;
                mapping.push((l, m));
                m
            }
        })
        .collect();
    Ok(LoadedDataset {
        points: PointSet::new(width - 1, coords)?,
        labels: Some(labels),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_labeled_csv() {
        let d = parse_points("0.1,0.2,1\n0.3,0.4,2\n", LabelMode::Auto, 0).unwrap();
        assert_eq!(d.points.len(), 2);
        assert_eq!(d.points.dim(), 2);
        assert_eq!(d.labels, Some(vec![1, 2]));
    }

    #[test]
    fn header_line_tolerated() {
        let d = parse_points("x,y,label\n0.1,0.2,1\n0.3,0.4,1\n", LabelMode::Auto, 0).unwrap();
        assert_eq!(d.points.len(), 2);
        assert_eq!(d.labels, Some(vec![1, 1]));
    }

    #[test]
    fn ragged_row_is_an_error_with_location() {
        let err = parse_points("0.1,0.2\n0.3,0.4\n1.0,2.0,3.0\n", LabelMode::None, 0).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn non_numeric_cell_past_header_is_an_error() {
        let err = parse_points("0.1,0.2\nfoo,0.4\n", LabelMode::None, 0).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn whitespace_delimited_without_labels() {
        let d = parse_points("0.1 0.25\n0.3 0.45\n", LabelMode::Auto, 0).unwrap();
        assert_eq!(d.points.dim(), 2);
        assert!(d.labels.is_none());
    }

    #[test]
    fn noise_token_maps_to_zero() {
        let d = parse_points("0,0,-1\n1,1,5\n2,2,5\n3,3,7\n", LabelMode::Required, -1).unwrap();
        assert_eq!(d.labels, Some(vec![0, 1, 1, 2]));
    }

    #[test]
    fn labels_can_be_disabled() {
        let d = parse_points("0.1,1\n0.3,2\n", LabelMode::None, 0).unwrap();
        assert_eq!(d.points.dim(), 2);
        assert!(d.labels.is_none());
    }
}
