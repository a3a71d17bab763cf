//! CSV ingestion and export.
//!
//! Format: comma-separated, UTF-8, first row is a header, decimal point '.'.
//! The label column is addressed by name; every other column is a numeric
//! feature. Row/column numbers in parse errors are 1-based, counting the
//! header as row 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::{Dataset, TaskKind};

/// Parses a CSV file into a dataset.
///
/// For classification the distinct label strings are sorted and one-hot
/// encoded in that order. With `normalize` set, every feature column is
/// scaled to unit sum of squares (the convention of the synthetic regression
/// generator).
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    task: TaskKind,
    normalize: bool,
) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    load_csv_str(&text, label_column, task, normalize)
}

/// As [`load_csv`], from an in-memory string.
pub fn load_csv_str(
    text: &str,
    label_column: &str,
    task: TaskKind,
    normalize: bool,
) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::config("csv file is empty"))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let label_idx = columns
        .iter()
        .position(|&c| c == label_column)
        .ok_or_else(|| Error::config(format!("label column '{label_column}' not in header")))?;
    let p = columns.len() - 1;
    if p == 0 {
        return Err(Error::config("csv has no feature columns"));
    }

    let mut x: Vec<f64> = Vec::new();
    let mut numeric_labels: Vec<f64> = Vec::new();
    let mut text_labels: Vec<String> = Vec::new();
    let mut n = 0usize;

    for (line_idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row = line_idx + 1; // 1-based, header = row 1
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::Parse {
                row,
                col: fields.len().min(columns.len()) + 1,
                msg: format!("expected {} fields, found {}", columns.len(), fields.len()),
            });
        }
        for (col_idx, field) in fields.iter().enumerate() {
            if col_idx == label_idx {
                match task {
                    TaskKind::Regression => {
                        let v: f64 = field.parse().map_err(|_| Error::Parse {
                            row,
                            col: col_idx + 1,
                            msg: format!("label '{field}' is not numeric"),
                        })?;
                        numeric_labels.push(v);
                    }
                    TaskKind::Classification => text_labels.push((*field).to_string()),
                }
            } else {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    row,
                    col: col_idx + 1,
                    msg: format!("feature '{field}' is not numeric"),
                })?;
                x.push(v);
            }
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::config("csv has no data rows"));
    }

    if normalize {
        for j in 0..p {
            let ss: f64 = (0..n).map(|i| x[i * p + j] * x[i * p + j]).sum();
            if ss > 0.0 {
                let inv = 1.0 / ss.sqrt();
                for i in 0..n {
                    x[i * p + j] *= inv;
                }
            }
        }
    }

    match task {
        TaskKind::Regression => Dataset::new(TaskKind::Regression, n, p, 1, x, numeric_labels),
        TaskKind::Classification => {
            let mut class_ids: BTreeMap<&str, usize> = BTreeMap::new();
            for label in &text_labels {
                let next = class_ids.len();
                class_ids.entry(label).or_insert(next);
            }
            // BTreeMap iteration is sorted; re-number in sorted order.
            for (rank, (_, id)) in class_ids.iter_mut().enumerate() {
                *id = rank;
            }
            let c = class_ids.len();
            if c < 2 {
                return Err(Error::domain("classification csv needs >= 2 distinct labels"));
            }
            let mut y = vec![0.0; n * c];
            for (i, label) in text_labels.iter().enumerate() {
                y[i * c + class_ids[label.as_str()]] = 1.0;
            }
            Dataset::new(TaskKind::Classification, n, p, c, x, y)
        }
    }
}

/// Writes a dataset as CSV: features `x1..xp`, then `y` (regression) or
/// `label` (classification, as the class index).
pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for j in 1..=ds.input_dim() {
        let _ = write!(out, "x{j},");
    }
    let label_name = match ds.task() {
        TaskKind::Regression => "y",
        TaskKind::Classification => "label",
    };
    out.push_str(label_name);
    out.push('\n');
    for i in 0..ds.len() {
        for v in ds.input(i) {
            let _ = write!(out, "{v},");
        }
        match ds.task() {
            TaskKind::Regression => {
                let _ = write!(out, "{}", ds.output(i)[0]);
            }
            TaskKind::Classification => {
                let _ = write!(out, "{}", ds.class_of(i).unwrap());
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_regression_round_trip() {
        let text = "a,b,y\n1.0,2.0,3.5\n4.0,5.0,-1.0\n0.5,0.25,0.0\n";
        let ds = load_csv_str(text, "y", TaskKind::Regression, false).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.input_dim(), 2);
        assert_eq!(ds.input(0), &[1.0, 2.0]);
        assert_eq!(ds.output(1), &[-1.0]);
        assert_eq!(ds.output(2), &[0.0]);
    }

    #[test]
    fn classification_labels_one_hot_in_sorted_order() {
        let text = "f1,label\n0.1,b\n0.2,a\n0.3,c\n0.4,a\n";
        let ds = load_csv_str(text, "label", TaskKind::Classification, false).unwrap();
        assert_eq!(ds.output_dim(), 3);
        assert_eq!(ds.class_of(0), Some(1)); // b
        assert_eq!(ds.class_of(1), Some(0)); // a
        assert_eq!(ds.class_of(2), Some(2)); // c
        assert_eq!(ds.class_of(3), Some(0));
    }

    #[test]
    fn label_column_can_sit_anywhere() {
        let text = "y,a,b\n7.0,1.0,2.0\n";
        let ds = load_csv_str(text, "y", TaskKind::Regression, false).unwrap();
        assert_eq!(ds.input(0), &[1.0, 2.0]);
        assert_eq!(ds.output(0), &[7.0]);
    }

    #[test]
    fn normalization_gives_unit_column_sum_of_squares() {
        let text = "a,b,y\n3.0,1.0,0.0\n4.0,2.0,0.0\n0.0,2.0,0.0\n";
        let ds = load_csv_str(text, "y", TaskKind::Regression, true).unwrap();
        for j in 0..2 {
            let ss: f64 = (0..ds.len()).map(|i| ds.input(i)[j] * ds.input(i)[j]).sum();
            assert!((ss - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ragged_row_reports_location() {
        let text = "a,b,y\n1.0,2.0,3.0\n1.0,2.0\n";
        match load_csv_str(text, "y", TaskKind::Regression, false) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_feature_reports_row_and_column() {
        let text = "a,b,y\n1.0,oops,3.0\n";
        match load_csv_str(text, "y", TaskKind::Regression, false) {
            Err(Error::Parse { row, col, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(col, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_label_column_is_config_error() {
        let text = "a,b\n1.0,2.0\n";
        assert!(matches!(
            load_csv_str(text, "y", TaskKind::Regression, false),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = std::env::temp_dir().join("momnet-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("spiral.csv");
        let ds = crate::data::gen_spiral(5);
        save_csv(&ds, &path).unwrap();
        let back = load_csv(&path, "label", TaskKind::Classification, false).unwrap();
        assert_eq!(back.len(), ds.len());
        assert_eq!(back.output_dim(), ds.output_dim());
        for i in 0..ds.len() {
            assert_eq!(back.class_of(i), ds.class_of(i));
            for (a, b) in back.input(i).iter().zip(ds.input(i)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
