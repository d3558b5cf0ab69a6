//! Joint angles from 3D poses and the activity → angle catalogue.
//!
//! An angle is defined by four markers `(m1, m2, m3, m4)`: the bone vectors
//! are `v1 = m2 - m1` and `v2 = m4 - m3`, and the angle is the one between
//! them, in degrees.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::{is_canonical, PoseSequence, CANONICAL_JOINTS};

/// Bone vectors shorter than this are treated as degenerate.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "name")]
pub enum Provenance {
    VideoModel(String),
    Imu,
    Synthetic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::VideoModel(name) => f.write_str(name),
            Provenance::Imu => f.write_str("IMU"),
            Provenance::Synthetic => f.write_str("synthetic"),
        }
    }
}

/// A uniformly sampled angle trajectory in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSeries {
    values: Vec<f64>,
    valid: Vec<bool>,
    sample_rate_hz: f64,
    label: String,
    provenance: Provenance,
}

impl AngleSeries {
    pub fn new(
        label: impl Into<String>,
        provenance: Provenance,
        sample_rate_hz: f64,
        values: Vec<f64>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::InvalidRate(sample_rate_hz));
        }
        if values.len() != valid.len() {
            return Err(Error::LengthMismatch(values.len(), valid.len()));
        }
        Ok(AngleSeries {
            values,
            valid,
            sample_rate_hz,
            label: label.into(),
            provenance,
        })
    }

    /// A series whose finite samples are valid and non-finite ones are not.
    pub fn from_values(
        label: impl Into<String>,
        provenance: Provenance,
        sample_rate_hz: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        let valid = values.iter().map(|v| v.is_finite()).collect();
        Self::new(label, provenance, sample_rate_hz, values, valid)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_fully_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Same label, provenance and rate with new samples, all valid.
    pub fn with_values(&self, values: Vec<f64>) -> AngleSeries {
        AngleSeries {
            valid: vec![true; values.len()],
            values,
            sample_rate_hz: self.sample_rate_hz,
            label: self.label.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn with_samples(&self, values: Vec<f64>, valid: Vec<bool>) -> Result<AngleSeries> {
        AngleSeries::new(
            self.label.clone(),
            self.provenance.clone(),
            self.sample_rate_hz,
            values,
            valid,
        )
    }

    pub fn with_rate(mut self, sample_rate_hz: f64) -> Result<AngleSeries> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::InvalidRate(sample_rate_hz));
        }
        self.sample_rate_hz = sample_rate_hz;
        Ok(self)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> AngleSeries {
        self.provenance = provenance;
        self
    }

    /// Sub-range `start..start + len`, keeping metadata.
    pub fn slice(&self, start: usize, len: usize) -> AngleSeries {
        AngleSeries {
            values: self.values[start..start + len].to_vec(),
            valid: self.valid[start..start + len].to_vec(),
            sample_rate_hz: self.sample_rate_hz,
            label: self.label.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Four markers defining the two bone vectors of an angle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleDefinition {
    name: String,
    markers: [String; 4],
}

impl AngleDefinition {
    pub fn new(name: impl Into<String>, markers: [&str; 4]) -> Result<Self> {
        let name = name.into();
        let invalid = |message: String| Error::InvalidDefinition {
            name: name.clone(),
            message,
        };
        if let Some(m) = markers.iter().find(|m| !is_canonical(m)) {
            return Err(invalid(format!("`{m}` is not a canonical joint")));
        }
        if markers[0] == markers[1] || markers[2] == markers[3] {
            return Err(invalid("a bone vector joins a joint to itself".into()));
        }
        Ok(AngleDefinition {
            markers: markers.map(str::to_string),
            name,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn markers(&self) -> [&str; 4] {
        [
            &self.markers[0],
            &self.markers[1],
            &self.markers[2],
            &self.markers[3],
        ]
    }
}

const BUILTIN_DEFINITIONS: [(&str, [&str; 4]); 6] = [
    ("arm_flex_r", ["right_shoulder", "right_elbow", "neck", "torso"]),
    ("arm_flex_l", ["left_shoulder", "left_elbow", "neck", "torso"]),
    ("elbow_flex_r", ["right_shoulder", "right_elbow", "right_elbow", "right_wrist"]),
    ("elbow_flex_l", ["left_shoulder", "left_elbow", "left_elbow", "left_wrist"]),
    ("knee_angle_r", ["right_hip", "right_knee", "right_knee", "right_ankle"]),
    ("knee_angle_l", ["left_hip", "left_knee", "left_knee", "left_ankle"]),
];

const BUILTIN_ACTIVITIES: [(&str, &str, &str); 13] = [
    ("A01", "knee_angle_l", "walk_forward"),
    ("A02", "knee_angle_r", "walk_backward"),
    ("A03", "knee_angle_l", "walk_along"),
    ("A04", "knee_angle_r", "sit_to_stand"),
    ("A05", "elbow_flex_r", "move_right_arm"),
    ("A06", "elbow_flex_l", "move_left_arm"),
    ("A07", "arm_flex_r", "drink_right_arm"),
    ("A08", "arm_flex_l", "drink_left_arm"),
    ("A09", "elbow_flex_r", "assemble_both_arms"),
    ("A10", "arm_flex_r", "throw_both_arms"),
    ("A11", "arm_flex_r", "reachup_right_arm"),
    ("A12", "arm_flex_l", "reachup_left_arm"),
    ("A13", "arm_flex_r", "tear_both_arms"),
];

pub fn builtin_angle_definitions() -> Vec<AngleDefinition> {
    BUILTIN_DEFINITIONS
        .iter()
        .map(|(name, markers)| AngleDefinition::new(*name, *markers).expect("builtin is valid"))
        .collect()
}

/// Short descriptive name of a builtin activity (e.g. `A01` → `walk_forward`).
pub fn activity_legend(activity_id: &str) -> Option<&'static str> {
    BUILTIN_ACTIVITIES
        .iter()
        .find(|(id, _, _)| *id == activity_id)
        .map(|(_, _, legend)| *legend)
}

/// Activity id → angle name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActivityAngleMap {
    entries: BTreeMap<String, String>,
}

impl ActivityAngleMap {
    pub fn angle_for(&self, activity_id: &str) -> Result<&str> {
        self.entries
            .get(activity_id)
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownActivity(activity_id.to_string()))
    }

    pub fn insert(&mut self, activity_id: impl Into<String>, angle: impl Into<String>) {
        self.entries.insert(activity_id.into(), angle.into());
    }

    pub fn contains(&self, activity_id: &str) -> bool {
        self.entries.contains_key(activity_id)
    }

    /// Entries ordered by activity id.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn builtin_activity_angle_map() -> ActivityAngleMap {
    let mut map = ActivityAngleMap::default();
    for (id, angle, _) in BUILTIN_ACTIVITIES {
        map.insert(id, angle);
    }
    map
}

/// Angle definitions plus the activity map that selects among them.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleCatalog {
    definitions: Vec<AngleDefinition>,
    activities: ActivityAngleMap,
}

impl Default for AngleCatalog {
    fn default() -> Self {
        AngleCatalog {
            definitions: builtin_angle_definitions(),
            activities: builtin_activity_angle_map(),
        }
    }
}

impl AngleCatalog {
    /// Builtins overridden by a text config. Lines are either
    /// `angle_name: m1,m2,m3,m4` or `A01: angle_name`; `#` starts a comment.
    pub fn with_overrides(text: &str) -> Result<Self> {
        let mut catalog = AngleCatalog::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: &str| Error::MapSyntax {
                line: idx + 1,
                message: format!("{message}: `{line}`"),
            };
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| syntax("expected `key: value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let markers: Vec<&str> = value.split(',').map(str::trim).collect();
            match markers.len() {
                4 => {
                    let def = AngleDefinition::new(
                        key,
                        [markers[0], markers[1], markers[2], markers[3]],
                    )?;
                    match catalog.definitions.iter_mut().find(|d| d.name == key) {
                        Some(existing) => *existing = def,
                        None => catalog.definitions.push(def),
                    }
                }
                1 if !value.is_empty() => catalog.activities.insert(key, value),
                _ => return Err(syntax("expected four markers or one angle name")),
            }
        }
        for (activity, angle) in catalog.activities.iter() {
            if catalog.definition(angle).is_err() {
                return Err(Error::InvalidDefinition {
                    name: angle.to_string(),
                    message: format!("activity {activity} refers to an undefined angle"),
                });
            }
        }
        Ok(catalog)
    }

    pub fn definitions(&self) -> &[AngleDefinition] {
        &self.definitions
    }

    pub fn activities(&self) -> &ActivityAngleMap {
        &self.activities
    }

    pub fn definition(&self, angle_name: &str) -> Result<&AngleDefinition> {
        self.definitions
            .iter()
            .find(|d| d.name == angle_name)
            .ok_or_else(|| Error::UnknownAngle(angle_name.to_string()))
    }

    pub fn for_activity(&self, activity_id: &str) -> Result<&AngleDefinition> {
        self.definition(self.activities.angle_for(activity_id)?)
    }

    /// Canonical joints referenced by any activity's angle, in canonical
    /// order.
    pub fn required_joints(&self) -> Vec<&'static str> {
        let used: Vec<&str> = self
            .activities
            .iter()
            .filter_map(|(_, angle)| self.definition(angle).ok())
            .flat_map(|def| def.markers())
            .collect();
        CANONICAL_JOINTS
            .iter()
            .copied()
            .filter(|j| used.contains(j))
            .collect()
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between two vectors in degrees, in `[0, 180]`.
///
/// Evaluated as `atan2(|v1 x v2|, v1 . v2)`, which equals
/// `acos(v1 . v2 / (|v1| |v2|))` but stays accurate near 0 and 180 degrees,
/// where the arccosine loses about half the significant digits.
pub fn vector_angle_deg(v1: [f64; 3], v2: [f64; 3]) -> f64 {
    norm(cross(v1, v2)).atan2(dot(v1, v2)).to_degrees()
}

pub fn joint_angle(seq: &PoseSequence, def: &AngleDefinition) -> Result<AngleSeries> {
    joint_angle_with_epsilon(seq, def, DEFAULT_EPSILON)
}

/// Per-frame angle between `m2 - m1` and `m4 - m3`. A frame is invalid when
/// any of the four joint samples is invalid or a bone is shorter than
/// `epsilon`.
pub fn joint_angle_with_epsilon(
    seq: &PoseSequence,
    def: &AngleDefinition,
    epsilon: f64,
) -> Result<AngleSeries> {
    let set = seq.joint_set();
    let mut idx = [0usize; 4];
    for (slot, marker) in idx.iter_mut().zip(def.markers()) {
        *slot = set
            .index_of(marker)
            .ok_or_else(|| Error::UnknownMarker(marker.to_string()))?;
    }

    let n = seq.n_frames();
    let mut values = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for frame in 0..n {
        let ok = idx.iter().all(|&j| seq.is_valid(frame, j));
        let v1 = sub(seq.point(frame, idx[1]), seq.point(frame, idx[0]));
        let v2 = sub(seq.point(frame, idx[3]), seq.point(frame, idx[2]));
        if ok && norm(v1) >= epsilon && norm(v2) >= epsilon {
            values.push(vector_angle_deg(v1, v2));
            valid.push(true);
        } else {
            values.push(f64::NAN);
            valid.push(false);
        }
    }
    // callers name the model with `with_provenance`
    AngleSeries::new(
        def.name(),
        Provenance::VideoModel(String::new()),
        seq.frame_rate_hz(),
        values,
        valid,
    )
}

/// Samples paired with their timestamps `i / rate` in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedSeries {
    pub time_s: Vec<f64>,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

pub fn frames_to_time(series: &AngleSeries) -> TimedSeries {
    let rate = series.sample_rate_hz();
    TimedSeries {
        time_s: (0..series.len()).map(|i| i as f64 / rate).collect(),
        values: series.values().to_vec(),
        valid: series.mask().to_vec(),
    }
}
