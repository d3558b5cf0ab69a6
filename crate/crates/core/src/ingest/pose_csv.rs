//! Canonical pose CSV: `frame,<joint>_x,<joint>_y,<joint>_z,...`, one row per
//! frame. Empty or non-numeric cells mark the joint sample invalid.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::skeleton::{JointSet, PoseSequence};

/// Column layout recovered from a header row.
struct Layout {
    joints: Vec<String>,
    /// Column index of x, y, z for each joint.
    columns: Vec<[usize; 3]>,
    width: usize,
}

fn parse_header(header: &csv::StringRecord) -> Result<Layout> {
    let mut joints: Vec<String> = Vec::new();
    let mut columns: Vec<[Option<usize>; 3]> = Vec::new();
    for (col, cell) in header.iter().enumerate() {
        let cell = cell.trim();
        if col == 0 && cell.eq_ignore_ascii_case("frame") {
            continue;
        }
        let (joint, axis) = match cell.rsplit_once('_') {
            Some((j, "x")) => (j, 0),
            Some((j, "y")) => (j, 1),
            Some((j, "z")) => (j, 2),
            _ => {
                return Err(Error::MalformedHeader(format!(
                    "column {} `{cell}` is not `<joint>_x|y|z`",
                    col + 1
                )))
            }
        };
        if joint.is_empty() {
            return Err(Error::MalformedHeader(format!("column {} has no joint name", col + 1)));
        }
        let slot = match joints.iter().position(|j| j == joint) {
            Some(i) => i,
            None => {
                joints.push(joint.to_string());
                columns.push([None; 3]);
                joints.len() - 1
            }
        };
        if columns[slot][axis].replace(col).is_some() {
            return Err(Error::MalformedHeader(format!("duplicate column `{cell}`")));
        }
    }
    if joints.is_empty() {
        return Err(Error::MalformedHeader("no coordinate columns".into()));
    }
    let columns = joints
        .iter()
        .zip(&columns)
        .map(|(j, c)| match c {
            [Some(x), Some(y), Some(z)] => Ok([*x, *y, *z]),
            _ => Err(Error::MalformedHeader(format!(
                "joint `{j}` lacks one of its x/y/z columns"
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Layout {
        joints,
        columns,
        width: header.len(),
    })
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses pose CSV from any reader. When `expected` is given, the output uses
/// its joint order and every expected joint must be present; other columns
/// are ignored.
pub fn parse_pose_csv<R: Read>(
    reader: R,
    expected: Option<&JointSet>,
    frame_rate_hz: f64,
) -> Result<PoseSequence> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::MalformedHeader(e.to_string()))?
        .clone();
    let layout = parse_header(&header)?;

    let (joint_set, columns) = match expected {
        Some(set) => {
            let cols = set
                .iter()
                .map(|name| {
                    layout
                        .joints
                        .iter()
                        .position(|j| j == name)
                        .map(|i| layout.columns[i])
                        .ok_or_else(|| {
                            Error::MalformedHeader(format!("missing joint `{name}`"))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            (set.clone(), cols)
        }
        None => (JointSet::new(layout.joints.clone())?, layout.columns.clone()),
    };

    let mut points = Vec::new();
    let mut valid = Vec::new();
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != layout.width {
            return Err(Error::RaggedRow {
                line,
                expected: layout.width,
                found: record.len(),
            });
        }
        for cols in &columns {
            let xyz = cols.map(|c| parse_cell(&record[c]));
            match xyz {
                [Some(x), Some(y), Some(z)] => {
                    points.push([x, y, z]);
                    valid.push(true);
                }
                _ => {
                    points.push([f64::NAN; 3]);
                    valid.push(false);
                }
            }
        }
    }
    if points.is_empty() {
        return Err(Error::NoFrames);
    }
    PoseSequence::new(joint_set, points, valid, frame_rate_hz)
}

pub fn read_pose_csv(
    path: &Path,
    expected: Option<&JointSet>,
    frame_rate_hz: f64,
) -> Result<PoseSequence> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_pose_csv(std::io::BufReader::new(file), expected, frame_rate_hz)
}

/// Renders a sequence as pose CSV with LF line endings. Invalid samples are
/// written as three empty cells.
pub fn pose_csv_string(seq: &PoseSequence) -> String {
    let mut out = String::from("frame");
    for joint in seq.joint_set().iter() {
        let _ = write!(out, ",{joint}_x,{joint}_y,{joint}_z");
    }
    out.push('\n');
    for frame in 0..seq.n_frames() {
        let _ = write!(out, "{frame}");
        for j in 0..seq.n_joints() {
            if seq.is_valid(frame, j) {
                let [x, y, z] = seq.point(frame, j);
                let _ = write!(out, ",{x},{y},{z}");
            } else {
                out.push_str(",,,");
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_pose_csv(seq: &PoseSequence, path: &Path) -> Result<()> {
    std::fs::write(path, pose_csv_string(seq)).map_err(|e| Error::io(path, e))
}
