//! OpenSim motion (`.mot` / `.sto`) reader.
//!
//! Layout: free-form header lines (`nRows=`, `nColumns=`, `inDegrees=` are
//! recognised), a line reading `endheader`, a row of column names whose first
//! entry is `time`, then numeric rows. Cells may be separated by tabs or
//! spaces.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kinematics::{AngleSeries, Provenance};

#[derive(Debug, Clone, PartialEq)]
pub struct MotTable {
    column_names: Vec<String>,
    /// Column-major storage, one vector per column.
    columns: Vec<Vec<f64>>,
    in_degrees: bool,
}

impl MotTable {
    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn in_degrees(&self) -> bool {
        self.in_degrees
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.column_names
            .iter()
            .position(|c| c == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn time(&self) -> &[f64] {
        &self.columns[0]
    }
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let (k, v) = line.split_once('=')?;
    k.trim().eq_ignore_ascii_case(key).then(|| v.trim())
}

fn parse_count(value: &str, key: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::MalformedHeader(format!("{key}={value} is not a count")))
}

pub fn parse_mot(text: &str) -> Result<MotTable> {
    let mut lines = text.lines().enumerate();

    let mut n_rows = None;
    let mut n_columns = None;
    let mut in_degrees = true;
    let mut saw_end = false;
    for (_, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.eq_ignore_ascii_case("endheader") {
            saw_end = true;
            break;
        }
        if let Some(v) = header_value(line, "nRows") {
            n_rows = Some(parse_count(v, "nRows")?);
        } else if let Some(v) = header_value(line, "nColumns") {
            n_columns = Some(parse_count(v, "nColumns")?);
        } else if let Some(v) = header_value(line, "inDegrees") {
            in_degrees = match v.to_ascii_lowercase().as_str() {
                "yes" | "true" => true,
                "no" | "false" => false,
                other => {
                    return Err(Error::MalformedHeader(format!("inDegrees={other}")));
                }
            };
        }
    }
    if !saw_end {
        return Err(Error::MissingEndHeader);
    }

    let (name_line, names) = loop {
        match lines.next() {
            Some((_, raw)) if raw.trim().is_empty() => continue,
            Some((i, raw)) => {
                let names: Vec<String> = if raw.contains('\t') {
                    raw.split('\t').map(|s| s.trim().to_string()).collect()
                } else {
                    raw.split_whitespace().map(str::to_string).collect()
                };
                break (i + 1, names);
            }
            None => return Err(Error::MalformedHeader("no column-name row".into())),
        }
    };
    if !names.first().is_some_and(|n| n.eq_ignore_ascii_case("time")) {
        return Err(Error::BadTimeColumn("first column is not `time`".into()));
    }
    if let Some(expected) = n_columns {
        if expected != names.len() {
            return Err(Error::ColumnCountMismatch {
                line: name_line,
                expected,
                found: names.len(),
            });
        }
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split_whitespace().collect();
        if cells.len() != names.len() {
            return Err(Error::ColumnCountMismatch {
                line: i + 1,
                expected: names.len(),
                found: cells.len(),
            });
        }
        for (col, (cell, dst)) in cells.iter().zip(columns.iter_mut()).enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::NonNumericCell {
                line: i + 1,
                col: col + 1,
                token: cell.to_string(),
            })?;
            dst.push(v);
        }
    }
    let found = columns[0].len();
    if let Some(expected) = n_rows {
        if expected != found {
            return Err(Error::RowCountMismatch { expected, found });
        }
    }
    let time = &columns[0];
    if time.iter().any(|t| !t.is_finite()) {
        return Err(Error::BadTimeColumn("non-finite time value".into()));
    }
    if let Some(w) = time.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::BadTimeColumn(format!(
            "time does not increase at data row {}",
            w + 2
        )));
    }

    Ok(MotTable {
        column_names: names,
        columns,
        in_degrees,
    })
}

pub fn read_mot(path: &Path) -> Result<MotTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mot(&text)
}

/// One column as an IMU angle series at `rate_hz`, converted to degrees when
/// the file stores radians. Non-finite cells are marked invalid.
pub fn extract_imu_angle(table: &MotTable, column: &str, rate_hz: f64) -> Result<AngleSeries> {
    let raw = table
        .column(column)
        .ok_or_else(|| Error::UnknownColumn(column.to_string()))?;
    let values: Vec<f64> = if table.in_degrees() {
        raw.to_vec()
    } else {
        raw.iter().map(|v| v.to_degrees()).collect()
    };
    AngleSeries::from_values(column, Provenance::Imu, rate_hz, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "walk\nversion=1\nnRows=3\nnColumns=2\ninDegrees=yes\nendheader\ntime\tknee_angle_l\n0.00\t10.5\n0.02\t11.0\n0.04\t12.25\n";

    #[test]
    fn minimal_file() {
        let t = parse_mot(MINIMAL).unwrap();
        assert_eq!(t.column_names(), &["time".to_string(), "knee_angle_l".to_string()]);
        assert_eq!(t.n_rows(), 3);
        assert!(t.in_degrees());
        assert_eq!(t.column("knee_angle_l").unwrap(), &[10.5, 11.0, 12.25]);
    }

    #[test]
    fn radians_are_converted() {
        // inDegrees after endheader is data, not header
        assert!(parse_mot("endheader\n\ninDegrees=no\n").is_err());

        let text = format!(
            "inDegrees=no\nendheader\ntime knee_angle_l\n0 {}\n0.02 0\n",
            std::f64::consts::FRAC_PI_2
        );
        let t = parse_mot(&text).unwrap();
        assert!(!t.in_degrees());
        let s = extract_imu_angle(&t, "knee_angle_l", 50.0).unwrap();
        assert!((s.values()[0] - 90.0).abs() < 1e-12);
        assert_eq!(s.label(), "knee_angle_l");
        assert_eq!(s.provenance(), &Provenance::Imu);
    }

    #[test]
    fn nan_cell_marks_sample_invalid() {
        let text = "endheader\ntime a\n0 1\n1 NaN\n2 3\n";
        let s = extract_imu_angle(&parse_mot(text).unwrap(), "a", 50.0).unwrap();
        assert_eq!(s.mask(), &[true, false, true]);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(parse_mot("nRows=1\ntime a\n0 1\n"), Err(Error::MissingEndHeader)));
        assert!(matches!(
            parse_mot("nColumns=3\nendheader\ntime a\n0 1\n"),
            Err(Error::ColumnCountMismatch { line: 3, expected: 3, found: 2 })
        ));
        assert!(matches!(
            parse_mot("endheader\ntime a\n0 1\n1 2 3\n"),
            Err(Error::ColumnCountMismatch { line: 4, .. })
        ));
        assert!(matches!(
            parse_mot("endheader\ntime a\n0 1\n1 x\n"),
            Err(Error::NonNumericCell { line: 4, col: 2, .. })
        ));
        assert!(matches!(
            parse_mot("nRows=5\nendheader\ntime a\n0 1\n"),
            Err(Error::RowCountMismatch { expected: 5, found: 1 })
        ));
        assert!(matches!(
            parse_mot("endheader\ntime a\n0 1\n0 2\n"),
            Err(Error::BadTimeColumn(_))
        ));
        assert!(matches!(
            parse_mot("endheader\nframe a\n0 1\n"),
            Err(Error::BadTimeColumn(_))
        ));
        let t = parse_mot(MINIMAL).unwrap();
        assert!(matches!(
            extract_imu_angle(&t, "elbow_flex_r", 50.0),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn space_delimited_and_trailing_blank_lines() {
        let text = "header\nendheader\ntime   a   b\n0  1  2\n0.5 3 4\n\n\n";
        let t = parse_mot(text).unwrap();
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.column("b").unwrap(), &[2.0, 4.0]);
    }
}
