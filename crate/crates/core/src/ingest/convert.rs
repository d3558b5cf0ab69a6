//! Conversion of model-native pose CSVs to the canonical skeleton.
//!
//! Every model kind is CSV-shaped (`<joint>_x,<joint>_y,<joint>_z` columns
//! with native joint names) and differs only in its harmonization map. New
//! kinds need a map file, not code.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::pose_csv::{read_pose_csv, write_pose_csv};
use crate::skeleton::{
    harmonize, HarmonizationMap, PoseSequence, BODYTRACK34_MAP, H36M17_ALIASES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Human3.6M-style 17 keypoints under any of the known aliases.
    H36m17Generic,
    /// NVIDIA BodyTrack 34 keypoints.
    Bodytrack34,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::H36m17Generic, ModelKind::Bodytrack34];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::H36m17Generic => "h36m17_generic",
            ModelKind::Bodytrack34 => "bodytrack34",
        }
    }

    pub fn builtin_map(self) -> HarmonizationMap {
        let text = match self {
            ModelKind::H36m17Generic => H36M17_ALIASES,
            ModelKind::Bodytrack34 => BODYTRACK34_MAP,
        };
        HarmonizationMap::parse(text).expect("builtin map parses")
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownModelKind(s.to_string()))
    }
}

/// Resolves the map for `kind` against the joints actually present.
///
/// The generic kind treats its map as an alias table and keeps only entries
/// whose source is present. BodyTrack and map-file kinds are applied as-is.
/// A kind that is neither builtin nor backed by `map_override` is rejected.
pub fn effective_map(
    seq: &PoseSequence,
    kind: &str,
    map_override: Option<&Path>,
) -> Result<HarmonizationMap> {
    let builtin = kind.parse::<ModelKind>().ok();
    let map = match (map_override, builtin) {
        (Some(path), _) => HarmonizationMap::from_path(path)?,
        (None, Some(k)) => k.builtin_map(),
        (None, None) => return Err(Error::UnknownModelKind(kind.to_string())),
    };
    Ok(match builtin {
        Some(ModelKind::H36m17Generic) => map.restrict_to(seq.joint_set()),
        _ => map,
    })
}

/// Reads a model-native pose CSV and harmonizes it onto the canonical
/// skeleton.
pub fn load_model_pose(
    path: &Path,
    kind: &str,
    map_override: Option<&Path>,
    required: &[&str],
    frame_rate_hz: f64,
) -> Result<PoseSequence> {
    // validate the kind before touching the file
    if map_override.is_none() {
        kind.parse::<ModelKind>()?;
    }
    let raw = read_pose_csv(path, None, frame_rate_hz)?;
    let map = effective_map(&raw, kind, map_override)?;
    harmonize(&raw, &map, required)
}

/// Writes the canonical pose CSV for `input` to `output`; returns the
/// harmonized sequence.
pub fn convert_model_output(
    input: &Path,
    kind: &str,
    map_override: Option<&Path>,
    required: &[&str],
    output: &Path,
) -> Result<PoseSequence> {
    // the frame rate is not stored in pose CSV; any positive value works here
    let seq = load_model_pose(input, kind, map_override, required, 30.0)?;
    write_pose_csv(&seq, output)?;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::pose_csv::{parse_pose_csv, pose_csv_string};
    use crate::kinematics::AngleCatalog;
    use crate::skeleton::{canonical_joint_set, JointSet, BODYTRACK34_JOINTS, CANONICAL_JOINTS};

    fn pose(names: &[&str], frames: usize) -> PoseSequence {
        let set = JointSet::new(names.iter().copied()).unwrap();
        let n = names.len();
        let points = (0..frames * n)
            .map(|i| [i as f64 * 0.25, 1.0 - i as f64, 2.5])
            .collect();
        PoseSequence::new(set, points, vec![true; frames * n], 30.0).unwrap()
    }

    fn required() -> Vec<&'static str> {
        AngleCatalog::default().required_joints()
    }

    #[test]
    fn neck_base_alias_becomes_neck() {
        let mut names: Vec<&str> = CANONICAL_JOINTS.to_vec();
        names[9] = "neck_base";
        names[0] = "root";
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.csv");
        let output = dir.path().join("out.csv");
        write_pose_csv(&pose(&names, 3), &input).unwrap();
        let seq =
            convert_model_output(&input, "h36m17_generic", None, &required(), &output).unwrap();
        assert_eq!(seq.joint_set(), &canonical_joint_set());
        let text = std::fs::read_to_string(&output).unwrap();
        assert!(text.contains(",neck_x,neck_y,neck_z"));
        assert!(!text.contains("neck_base"));
    }

    #[test]
    fn bodytrack_to_17_joints() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("bt.csv");
        let output = dir.path().join("out.csv");
        write_pose_csv(&pose(&BODYTRACK34_JOINTS, 2), &input).unwrap();
        let seq = convert_model_output(&input, "bodytrack34", None, &required(), &output).unwrap();
        assert_eq!(seq.n_joints(), 17);
        let back = parse_pose_csv(std::fs::File::open(&output).unwrap(), None, 30.0).unwrap();
        assert_eq!(back.n_joints(), 17);
        assert_eq!(back.n_frames(), 2);
    }

    #[test]
    fn canonical_input_converts_to_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("c.csv");
        let output = dir.path().join("out.csv");
        let seq = pose(&CANONICAL_JOINTS, 4);
        write_pose_csv(&seq, &input).unwrap();
        convert_model_output(&input, "h36m17_generic", None, &required(), &output).unwrap();
        assert_eq!(
            std::fs::read(&input).unwrap(),
            std::fs::read(&output).unwrap()
        );
        assert_eq!(pose_csv_string(&seq), std::fs::read_to_string(&output).unwrap());
    }

    #[test]
    fn unknown_kind_needs_a_map() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("c.csv");
        let output = dir.path().join("out.csv");
        write_pose_csv(&pose(&["a", "b"], 1), &input).unwrap();
        assert!(matches!(
            convert_model_output(&input, "openpose25", None, &[], &output),
            Err(Error::UnknownModelKind(k)) if k == "openpose25"
        ));
        let map = dir.path().join("custom.map");
        std::fs::write(&map, "a -> neck\nb -> torso\n").unwrap();
        let seq = convert_model_output(&input, "openpose25", Some(&map), &["neck"], &output).unwrap();
        assert_eq!(seq.joint_set().names(), &["torso".to_string(), "neck".to_string()]);
    }

    #[test]
    fn missing_required_joint_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("c.csv");
        let names: Vec<&str> = CANONICAL_JOINTS.iter().copied().filter(|j| *j != "left_knee").collect();
        write_pose_csv(&pose(&names, 1), &input).unwrap();
        assert!(matches!(
            load_model_pose(&input, "h36m17_generic", None, &required(), 30.0),
            Err(Error::MissingRequiredTarget(j)) if j == "left_knee"
        ));
    }
}
