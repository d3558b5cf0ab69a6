//! Canonical 17-joint skeleton and harmonization of model-native joint sets.
//!
//! The canonical layout follows the Human3.6M 17-keypoint ordering. Names are
//! the ones used by the angle definitions (`torso`, `neck`, ...); model-native
//! aliases such as `neck_base` or `spine` are resolved through
//! [`HarmonizationMap`]s, never by the canon itself.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Canonical joint order. Index `i` is the Human3.6M keypoint `i`.
pub const CANONICAL_JOINTS: [&str; 17] = [
    "pelvis",
    "right_hip",
    "right_knee",
    "right_ankle",
    "left_hip",
    "left_knee",
    "left_ankle",
    "torso",
    "thorax",
    "neck",
    "head",
    "left_shoulder",
    "left_elbow",
    "left_wrist",
    "right_shoulder",
    "right_elbow",
    "right_wrist",
];

/// Best-effort NVIDIA BodyTrack (34 keypoints) to canonical map. Not verified
/// against the original harmonization scripts.
pub const BODYTRACK34_MAP: &str = include_str!("../maps/bodytrack34.map");

/// Alias table for 17-keypoint Human3.6M-style outputs (MMPose, MotionBERT,
/// MotionAGFormer). Several aliases may point at one canonical joint; only the
/// aliases present in a given file are turned into a map.
pub const H36M17_ALIASES: &str = include_str!("../maps/h36m17_generic.map");

/// The 34 keypoint names of the BodyTrack layout, in native order.
pub const BODYTRACK34_JOINTS: [&str; 34] = [
    "pelvis",
    "left_hip",
    "right_hip",
    "torso",
    "left_knee",
    "right_knee",
    "neck",
    "left_ankle",
    "right_ankle",
    "left_big_toe",
    "right_big_toe",
    "left_small_toe",
    "right_small_toe",
    "left_heel",
    "right_heel",
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_pinky_knuckle",
    "right_pinky_knuckle",
    "left_middle_tip",
    "right_middle_tip",
    "left_index_knuckle",
    "right_index_knuckle",
    "left_thumb_tip",
    "right_thumb_tip",
];

/// An ordered list of unique joint names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointSet {
    names: Vec<String>,
}

impl JointSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateJoint(name.clone()));
            }
        }
        Ok(JointSet { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// The fixed 17-joint canonical set.
pub fn canonical_joint_set() -> JointSet {
    JointSet {
        names: CANONICAL_JOINTS.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn is_canonical(name: &str) -> bool {
    CANONICAL_JOINTS.contains(&name)
}

/// Renames model-native joints onto canonical ones. Source joints without an
/// entry are discarded by [`harmonize`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HarmonizationMap {
    entries: Vec<(String, String)>,
}

impl HarmonizationMap {
    pub fn new<I, A, B>(entries: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        HarmonizationMap {
            entries: entries
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        }
    }

    /// Identity map for every joint of `set`.
    pub fn identity(set: &JointSet) -> Self {
        HarmonizationMap::new(set.iter().map(|n| (n, n)))
    }

    /// Parses `source -> target` lines. `#` starts a comment; blank lines are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (source, target) = line.split_once("->").ok_or_else(|| Error::MapSyntax {
                line: idx + 1,
                message: format!("expected `source -> target`, got `{line}`"),
            })?;
            let (source, target) = (source.trim(), target.trim());
            if source.is_empty() || target.is_empty() || target.contains("->") {
                return Err(Error::MapSyntax {
                    line: idx + 1,
                    message: format!("expected `source -> target`, got `{line}`"),
                });
            }
            entries.push((source.to_string(), target.to_string()));
        }
        Ok(HarmonizationMap { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn target_of(&self, source: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(s, _)| s == source)
            .map(|(_, t)| t.as_str())
    }

    /// Restricts an alias table to the sources present in `source`, keeping
    /// the order of the table.
    pub fn restrict_to(&self, source: &JointSet) -> HarmonizationMap {
        HarmonizationMap {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| source.contains(s))
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for HarmonizationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, t) in &self.entries {
            writeln!(f, "{s} -> {t}")?;
        }
        Ok(())
    }
}

/// Per-frame 3D joint positions with a per-sample validity mask.
///
/// Storage is frame-major: the sample for joint `j` in frame `f` lives at
/// `f * n_joints + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSequence {
    joint_set: JointSet,
    points: Vec<[f64; 3]>,
    valid: Vec<bool>,
    frame_rate_hz: f64,
}

impl PoseSequence {
    pub fn new(
        joint_set: JointSet,
        points: Vec<[f64; 3]>,
        valid: Vec<bool>,
        frame_rate_hz: f64,
    ) -> Result<Self> {
        if !(frame_rate_hz > 0.0 && frame_rate_hz.is_finite()) {
            return Err(Error::InvalidRate(frame_rate_hz));
        }
        let n = joint_set.len();
        if n == 0 {
            return Err(Error::InvalidPose("empty joint set".into()));
        }
        if !points.len().is_multiple_of(n) {
            return Err(Error::InvalidPose(format!(
                "{} samples is not a multiple of {} joints",
                points.len(),
                n
            )));
        }
        if valid.len() != points.len() {
            return Err(Error::InvalidPose(format!(
                "mask has {} entries for {} samples",
                valid.len(),
                points.len()
            )));
        }
        Ok(PoseSequence {
            joint_set,
            points,
            valid,
            frame_rate_hz,
        })
    }

    /// Builds a fully valid sequence from per-frame joint rows.
    pub fn from_frames(
        joint_set: JointSet,
        frames: Vec<Vec<[f64; 3]>>,
        frame_rate_hz: f64,
    ) -> Result<Self> {
        let n = joint_set.len();
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.len() != n) {
            return Err(Error::InvalidPose(format!(
                "frame {i} has {} joints, expected {n}",
                f.len()
            )));
        }
        let points: Vec<[f64; 3]> = frames.into_iter().flatten().collect();
        let valid = vec![true; points.len()];
        Self::new(joint_set, points, valid, frame_rate_hz)
    }

    pub fn joint_set(&self) -> &JointSet {
        &self.joint_set
    }

    pub fn n_frames(&self) -> usize {
        self.points.len() / self.joint_set.len()
    }

    pub fn n_joints(&self) -> usize {
        self.joint_set.len()
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.frame_rate_hz
    }

    pub fn point(&self, frame: usize, joint: usize) -> [f64; 3] {
        self.points[frame * self.n_joints() + joint]
    }

    pub fn is_valid(&self, frame: usize, joint: usize) -> bool {
        self.valid[frame * self.n_joints() + joint]
    }

    pub fn set_point(&mut self, frame: usize, joint: usize, p: [f64; 3]) {
        let n = self.n_joints();
        self.points[frame * n + joint] = p;
    }

    pub fn set_valid(&mut self, frame: usize, joint: usize, valid: bool) {
        let n = self.n_joints();
        self.valid[frame * n + joint] = valid;
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    /// Applies `f` to every coordinate triple, keeping the mask.
    pub fn map_points(&self, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> PoseSequence {
        PoseSequence {
            joint_set: self.joint_set.clone(),
            points: self.points.iter().map(|&p| f(p)).collect(),
            valid: self.valid.clone(),
            frame_rate_hz: self.frame_rate_hz,
        }
    }
}

/// Problems that would make [`harmonize`] fail. Empty iff harmonization
/// succeeds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub unknown_sources: Vec<String>,
    pub non_canonical_targets: Vec<String>,
    pub duplicate_targets: Vec<String>,
    pub unmapped_required: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.unknown_sources.is_empty()
            && self.non_canonical_targets.is_empty()
            && self.duplicate_targets.is_empty()
            && self.unmapped_required.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups = [
            ("unknown sources", &self.unknown_sources),
            ("non-canonical targets", &self.non_canonical_targets),
            ("duplicate targets", &self.duplicate_targets),
            ("unmapped required joints", &self.unmapped_required),
        ];
        let mut first = true;
        for (label, items) in groups {
            if items.is_empty() {
                continue;
            }
            if !first {
                f.write_str("; ")?;
            }
            first = false;
            write!(f, "{label}: {}", items.join(", "))?;
        }
        if first {
            f.write_str("ok")?;
        }
        Ok(())
    }
}

pub fn validate_map(
    map: &HarmonizationMap,
    source: &JointSet,
    required: &[&str],
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for (s, t) in map.entries() {
        if !source.contains(s) && !report.unknown_sources.contains(s) {
            report.unknown_sources.push(s.clone());
        }
        if !is_canonical(t) && !report.non_canonical_targets.contains(t) {
            report.non_canonical_targets.push(t.clone());
        }
        *counts.entry(t.as_str()).or_default() += 1;
    }
    for (_, t) in map.entries() {
        if counts[t.as_str()] > 1 && !report.duplicate_targets.contains(t) {
            report.duplicate_targets.push(t.clone());
        }
    }
    for r in required {
        if !counts.contains_key(r) {
            report.unmapped_required.push(r.to_string());
        }
    }
    report
}

/// Renames and selects joints onto the canonical skeleton.
///
/// The output joint set lists the mapped canonical joints in canonical order.
/// Coordinates and masks are copied bit-for-bit; nothing is interpolated.
pub fn harmonize(
    seq: &PoseSequence,
    map: &HarmonizationMap,
    required: &[&str],
) -> Result<PoseSequence> {
    let src = seq.joint_set();
    let mut by_target: HashMap<&str, usize> = HashMap::new();
    for (s, t) in map.entries() {
        let idx = src
            .index_of(s)
            .ok_or_else(|| Error::MissingSourceJoint(s.clone()))?;
        if !is_canonical(t) {
            return Err(Error::NotCanonical(t.clone()));
        }
        if by_target.insert(t.as_str(), idx).is_some() {
            return Err(Error::DuplicateTarget(t.clone()));
        }
    }
    if let Some(missing) = required.iter().find(|r| !by_target.contains_key(*r)) {
        return Err(Error::MissingRequiredTarget(missing.to_string()));
    }

    let selected: Vec<(&str, usize)> = CANONICAL_JOINTS
        .iter()
        .filter_map(|&name| by_target.get(name).map(|&idx| (name, idx)))
        .collect();
    let joint_set = JointSet::new(selected.iter().map(|(n, _)| *n))?;

    let n_frames = seq.n_frames();
    let mut points = Vec::with_capacity(n_frames * selected.len());
    let mut valid = Vec::with_capacity(n_frames * selected.len());
    for frame in 0..n_frames {
        for &(_, idx) in &selected {
            points.push(seq.point(frame, idx));
            valid.push(seq.is_valid(frame, idx));
        }
    }
    PoseSequence::new(joint_set, points, valid, seq.frame_rate_hz())
}
