//! Synthetic skeletons with closed-form joint angles, corruption operators
//! and runnable on-disk fixtures.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`. Gaussian noise
//! uses the Box–Muller transform on two uniform draws in `[0, 1)`, so fixtures
//! can be regenerated bit-for-bit by any implementation of the same scheme.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{pose_csv_string, DEFAULT_IMU_RATE_HZ, DEFAULT_VIDEO_RATE_HZ};
use crate::kinematics::{builtin_activity_angle_map, AngleSeries, Provenance};
use crate::skeleton::{canonical_joint_set, PoseSequence, CANONICAL_JOINTS};

/// Largest lag a corruption may introduce, matching the alignment search.
pub const MAX_LAG_SAMPLES: i64 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    /// Both knees follow the target angle.
    SinusoidKnee,
    /// Both elbows follow the target angle.
    SinusoidElbow,
    /// Every joint stays put; the knees sit at 90 degrees.
    ConstantPose,
}

impl Motion {
    pub const ALL: [Motion; 3] = [Motion::SinusoidKnee, Motion::SinusoidElbow, Motion::ConstantPose];

    pub fn name(self) -> &'static str {
        match self {
            Motion::SinusoidKnee => "sinusoid_knee",
            Motion::SinusoidElbow => "sinusoid_elbow",
            Motion::ConstantPose => "constant_pose",
        }
    }

    /// Catalogue angle whose value the motion prescribes.
    pub fn angle_name(self) -> &'static str {
        match self {
            Motion::SinusoidKnee | Motion::ConstantPose => "knee_angle_l",
            Motion::SinusoidElbow => "elbow_flex_l",
        }
    }

    fn drives_knees(self) -> bool {
        matches!(self, Motion::SinusoidKnee | Motion::ConstantPose)
    }
}

impl FromStr for Motion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Motion::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::schema("motion", format!("unknown motion `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub motion: Motion,
    pub amplitude_deg: f64,
    pub frequency_hz: f64,
    pub duration_s: f64,
    pub rate_hz: f64,
    /// Drives segment lengths and the global placement of the body.
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            motion: Motion::SinusoidKnee,
            amplitude_deg: 30.0,
            frequency_hz: 0.5,
            duration_s: 20.0,
            rate_hz: DEFAULT_VIDEO_RATE_HZ,
            seed: 1,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::schema(field, format!("must be positive, got {v}")))
    }
}

impl SynthSpec {
    /// Amplitude 0 is accepted and yields a constant 90 degree trajectory.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=90.0).contains(&self.amplitude_deg) {
            return Err(Error::schema(
                "amplitude_deg",
                format!("must lie in [0, 90], got {}", self.amplitude_deg),
            ));
        }
        positive("frequency_hz", self.frequency_hz)?;
        positive("duration_s", self.duration_s)?;
        positive("rate_hz", self.rate_hz)
    }

    pub fn n_samples(&self, rate_hz: f64) -> usize {
        ((self.duration_s * rate_hz).round() as usize).max(1)
    }

    /// Target angle at time `t` seconds.
    pub fn angle_at(&self, t: f64) -> f64 {
        match self.motion {
            Motion::ConstantPose => 90.0,
            _ => 90.0 + self.amplitude_deg * (2.0 * PI * self.frequency_hz * t).sin(),
        }
    }

    /// Target angle sampled at `rate_hz` from `t = 0`.
    pub fn analytic_series(&self, rate_hz: f64) -> Result<AngleSeries> {
        let values = (0..self.n_samples(rate_hz))
            .map(|i| self.angle_at(i as f64 / rate_hz))
            .collect();
        AngleSeries::from_values(self.motion.angle_name(), Provenance::Synthetic, rate_hz, values)
    }
}

/// Segment lengths and placement drawn from the spec's seed.
struct Body {
    origin: [f64; 3],
    thigh: f64,
    shank: f64,
    upper_arm: f64,
    forearm: f64,
    hip_half_width: f64,
    shoulder_half_width: f64,
}

impl Body {
    fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = || rng.random::<f64>();
        Body {
            origin: [2.0 * u() - 1.0, 0.0, 2.0 * u() - 1.0],
            thigh: 0.40 + 0.10 * u(),
            shank: 0.38 + 0.10 * u(),
            upper_arm: 0.28 + 0.06 * u(),
            forearm: 0.25 + 0.06 * u(),
            hip_half_width: 0.10 + 0.03 * u(),
            shoulder_half_width: 0.18 + 0.04 * u(),
        }
    }

    /// Canonical joints for one frame. The hinge at each knee (elbow) turns
    /// the distal segment away from the straight-down proximal segment by
    /// the given angle within the sagittal x-y plane.
    fn frame(&self, knee_deg: [f64; 2], elbow_deg: [f64; 2]) -> [[f64; 3]; 17] {
        let [ox, oy, oz] = self.origin;
        let at = |x: f64, y: f64, z: f64| [ox + x, oy + y, oz + z];
        let hinge = |from: [f64; 3], len: f64, deg: f64| {
            let t = deg.to_radians();
            [from[0] + len * t.sin(), from[1] - len * t.cos(), from[2]]
        };
        let below = |from: [f64; 3], len: f64| [from[0], from[1] - len, from[2]];

        let (hw, sw) = (self.hip_half_width, self.shoulder_half_width);
        let pelvis = at(0.0, 1.0, 0.0);
        let right_hip = at(0.0, 1.0, -hw);
        let left_hip = at(0.0, 1.0, hw);
        let right_knee = below(right_hip, self.thigh);
        let left_knee = below(left_hip, self.thigh);
        let right_ankle = hinge(right_knee, self.shank, knee_deg[1]);
        let left_ankle = hinge(left_knee, self.shank, knee_deg[0]);
        let right_shoulder = at(0.0, 1.55, -sw);
        let left_shoulder = at(0.0, 1.55, sw);
        let right_elbow = below(right_shoulder, self.upper_arm);
        let left_elbow = below(left_shoulder, self.upper_arm);
        let right_wrist = hinge(right_elbow, self.forearm, elbow_deg[1]);
        let left_wrist = hinge(left_elbow, self.forearm, elbow_deg[0]);
        [
            pelvis,
            right_hip,
            right_knee,
            right_ankle,
            left_hip,
            left_knee,
            left_ankle,
            at(0.0, 1.25, 0.0),
            at(0.0, 1.5, 0.0),
            at(0.0, 1.6, 0.0),
            at(0.0, 1.75, 0.0),
            left_shoulder,
            left_elbow,
            left_wrist,
            right_shoulder,
            right_elbow,
            right_wrist,
        ]
    }
}

const REST_KNEE_DEG: f64 = 10.0;
const REST_ELBOW_DEG: f64 = 15.0;

/// Canonical pose whose prescribed angle follows `angles`, sampled at the
/// series' rate. Invalid angle samples invalidate the distal joints.
pub fn pose_from_angles(motion: Motion, angles: &AngleSeries, seed: u64) -> Result<PoseSequence> {
    let body = Body::from_seed(seed);
    let set = canonical_joint_set();
    let distal: [usize; 2] = if motion.drives_knees() {
        [6, 3]
    } else {
        [13, 16]
    };
    debug_assert_eq!(CANONICAL_JOINTS[6], "left_ankle");
    debug_assert_eq!(CANONICAL_JOINTS[13], "left_wrist");

    let mut points = Vec::with_capacity(angles.len() * 17);
    let mut valid = Vec::with_capacity(angles.len() * 17);
    for (&theta, &ok) in angles.values().iter().zip(angles.mask()) {
        let frame = if motion.drives_knees() {
            body.frame([theta; 2], [REST_ELBOW_DEG; 2])
        } else {
            body.frame([REST_KNEE_DEG; 2], [theta; 2])
        };
        for (j, p) in frame.into_iter().enumerate() {
            if !ok && distal.contains(&j) {
                points.push([f64::NAN; 3]);
                valid.push(false);
            } else {
                points.push(p);
                valid.push(true);
            }
        }
    }
    PoseSequence::new(set, points, valid, angles.sample_rate_hz())
}

/// Canonical pose sequence and its analytic target angle, both at
/// `spec.rate_hz`.
pub fn synth_pose(spec: &SynthSpec) -> Result<(PoseSequence, AngleSeries)> {
    spec.validate()?;
    let analytic = spec.analytic_series(spec.rate_hz)?;
    let pose = pose_from_angles(spec.motion, &analytic, spec.seed)?;
    Ok((pose, analytic))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CorruptionSpec {
    /// Standard deviation of additive Gaussian noise. Degrees on angle
    /// series, pose units on coordinates.
    pub noise_std_deg: f64,
    /// Probability that a sample is marked invalid.
    pub dropout_prob: f64,
    /// Positive values delay the content by that many samples.
    pub lag_samples: i64,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_std_deg >= 0.0 && self.noise_std_deg.is_finite()) {
            return Err(Error::schema("noise_std_deg", "must be finite and non-negative"));
        }
        if !(0.0..1.0).contains(&self.dropout_prob) {
            return Err(Error::schema("dropout_prob", "must lie in [0, 1)"));
        }
        if self.lag_samples.abs() > MAX_LAG_SAMPLES {
            return Err(Error::schema(
                "lag_samples",
                format!("|lag| must not exceed {MAX_LAG_SAMPLES}"),
            ));
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.noise_std_deg == 0.0 && self.dropout_prob == 0.0 && self.lag_samples == 0
    }

    /// Noise and dropout draw from separate ChaCha streams of one seed so that
    /// changing one rate leaves the other pattern untouched.
    fn rngs(&self) -> (ChaCha8Rng, ChaCha8Rng) {
        let noise = ChaCha8Rng::seed_from_u64(self.seed);
        let mut dropout = ChaCha8Rng::seed_from_u64(self.seed);
        dropout.set_stream(1);
        (noise, dropout)
    }
}

/// Standard normal deviate via Box–Muller; uses two uniform draws.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Shifts `items` by `lag` positions, holding the first (last) element to
/// fill the gap opened at the start (end).
fn shift<T: Clone>(items: &[T], lag: i64) -> Vec<T> {
    let n = items.len();
    let k = (lag.unsigned_abs() as usize).min(n);
    if n == 0 || k == 0 {
        return items.to_vec();
    }
    if lag > 0 {
        std::iter::repeat_n(items[0].clone(), k)
            .chain(items[..n - k].iter().cloned())
            .collect()
    } else {
        items[k..]
            .iter()
            .cloned()
            .chain(std::iter::repeat_n(items[n - 1].clone(), k))
            .collect()
    }
}

/// Noise, then dropout, then lag. Length and metadata are preserved.
pub fn corrupt_series(series: &AngleSeries, spec: &CorruptionSpec) -> Result<AngleSeries> {
    spec.validate()?;
    let (mut noise_rng, mut drop_rng) = spec.rngs();
    let mut values = series.values().to_vec();
    let mut valid = series.mask().to_vec();
    if spec.noise_std_deg > 0.0 {
        for v in &mut values {
            *v += spec.noise_std_deg * gaussian(&mut noise_rng);
        }
    }
    if spec.dropout_prob > 0.0 {
        for (v, ok) in values.iter_mut().zip(&mut valid) {
            if drop_rng.random::<f64>() < spec.dropout_prob {
                *ok = false;
                *v = f64::NAN;
            }
        }
    }
    series.with_samples(shift(&values, spec.lag_samples), shift(&valid, spec.lag_samples))
}

/// Per-coordinate noise, per joint-sample dropout and a whole-frame lag.
pub fn corrupt_pose(seq: &PoseSequence, spec: &CorruptionSpec) -> Result<PoseSequence> {
    spec.validate()?;
    let (mut noise_rng, mut drop_rng) = spec.rngs();
    let mut points = seq.points().to_vec();
    let mut valid = seq.mask().to_vec();
    if spec.noise_std_deg > 0.0 {
        for p in &mut points {
            for c in p.iter_mut() {
                *c += spec.noise_std_deg * gaussian(&mut noise_rng);
            }
        }
    }
    if spec.dropout_prob > 0.0 {
        for (p, ok) in points.iter_mut().zip(&mut valid) {
            if drop_rng.random::<f64>() < spec.dropout_prob {
                *ok = false;
                *p = [f64::NAN; 3];
            }
        }
    }
    let n = seq.n_joints();
    let frames: Vec<&[[f64; 3]]> = points.chunks(n).collect();
    let masks: Vec<&[bool]> = valid.chunks(n).collect();
    let points: Vec<[f64; 3]> = shift(&frames, spec.lag_samples).concat();
    let valid: Vec<bool> = shift(&masks, spec.lag_samples).concat();
    PoseSequence::new(seq.joint_set().clone(), points, valid, seq.frame_rate_hz())
}

/// One synthetic trial: a motion observed through a corrupted "model".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureTrial {
    pub subject_id: String,
    pub activity_id: String,
    pub model_name: String,
    pub motion: SynthSpec,
    #[serde(default)]
    pub corruption: CorruptionSpec,
}

/// A set of trials plus the sampling rates of both modalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureBundle {
    pub trials: Vec<FixtureTrial>,
    pub imu_rate_hz: f64,
}

impl Default for FixtureBundle {
    fn default() -> Self {
        benchmark_bundle()
    }
}

/// Four views of one knee trial: clean, noisy (0.5 deg), lagged by 7
/// samples, and noisy plus lagged.
pub fn benchmark_bundle() -> FixtureBundle {
    let motion = SynthSpec::default();
    let variants = [
        ("clean", CorruptionSpec::default()),
        (
            "noisy",
            CorruptionSpec {
                noise_std_deg: 0.5,
                seed: 11,
                ..Default::default()
            },
        ),
        (
            "lagged",
            CorruptionSpec {
                lag_samples: 7,
                ..Default::default()
            },
        ),
        (
            "noisy_lagged",
            CorruptionSpec {
                noise_std_deg: 0.5,
                lag_samples: 7,
                seed: 13,
                ..Default::default()
            },
        ),
    ];
    FixtureBundle {
        trials: variants
            .into_iter()
            .map(|(model, corruption)| FixtureTrial {
                subject_id: "S01".into(),
                activity_id: "A01".into(),
                model_name: model.into(),
                motion,
                corruption,
            })
            .collect(),
        imu_rate_hz: DEFAULT_IMU_RATE_HZ,
    }
}

/// Writes the `.mot` text directly rather than through any table type, so
/// the reader is exercised against an independent writer.
pub fn mot_text(name: &str, column: &str, series: &AngleSeries) -> String {
    let rate = series.sample_rate_hz();
    let mut out = String::new();
    let _ = writeln!(out, "{name}");
    out.push_str("version=1\n");
    let _ = writeln!(out, "nRows={}", series.len());
    out.push_str("nColumns=2\ninDegrees=yes\nendheader\n");
    let _ = writeln!(out, "time\t{column}");
    for (i, v) in series.values().iter().enumerate() {
        let _ = writeln!(out, "{}\t{v}", i as f64 / rate);
    }
    out
}

fn file_stem(parts: &[&str]) -> String {
    parts
        .iter()
        .map(|p| {
            p.chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("_")
}

/// Writes pose CSVs, `.mot` references and `manifest.json` into `dir` and
/// returns the manifest path. Trials sharing a subject and activity share a
/// reference file and must share their motion spec.
pub fn emit_fixture(bundle: &FixtureBundle, dir: &Path) -> Result<PathBuf> {
    positive("imu_rate_hz", bundle.imu_rate_hz)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let activities = builtin_activity_angle_map();
    let write = |name: &str, text: &str| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };

    let mut references: BTreeMap<(&str, &str), SynthSpec> = BTreeMap::new();
    let mut trials = Vec::new();
    for trial in &bundle.trials {
        trial.motion.validate()?;
        let column = activities.angle_for(&trial.activity_id)?;
        let key = (trial.subject_id.as_str(), trial.activity_id.as_str());
        let imu_name = format!("{}_imu.mot", file_stem(&[key.0, key.1]));
        match references.get(&key) {
            Some(spec) if spec != &trial.motion => {
                return Err(Error::schema(
                    "motion",
                    format!("trials of {} {} disagree on the motion", key.0, key.1),
                ));
            }
            Some(_) => {}
            None => {
                let truth = trial.motion.analytic_series(bundle.imu_rate_hz)?;
                write(&imu_name, &mot_text("synthetic", column, &truth))?;
                references.insert(key, trial.motion);
            }
        }

        let analytic = trial.motion.analytic_series(trial.motion.rate_hz)?;
        let observed = corrupt_series(&analytic, &trial.corruption)?;
        let pose = pose_from_angles(trial.motion.motion, &observed, trial.motion.seed)?;
        let pose_name = format!("{}_pose.csv", file_stem(&[key.0, key.1, &trial.model_name]));
        write(&pose_name, &pose_csv_string(&pose))?;

        trials.push(serde_json::json!({
            "subject_id": trial.subject_id,
            "activity_id": trial.activity_id,
            "model_name": trial.model_name,
            "pose_file_path": pose_name,
            "imu_file_path": imu_name,
            "imu_column_name": column,
            "video_rate_hz": trial.motion.rate_hz,
            "imu_rate_hz": bundle.imu_rate_hz,
        }));
    }
    let manifest = serde_json::json!({ "trials": trials, "output_dir": "results" });
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    write("manifest.json", &text)?;
    Ok(dir.join("manifest.json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{best_offset, AlignmentConfig};
    use crate::ingest::{load_manifest, parse_mot, extract_imu_angle};
    use crate::kinematics::{joint_angle, AngleCatalog};

    fn check_oracle(spec: &SynthSpec) {
        let (pose, analytic) = synth_pose(spec).unwrap();
        let def = AngleCatalog::default()
            .definition(spec.motion.angle_name())
            .unwrap()
            .clone();
        let measured = joint_angle(&pose, &def).unwrap();
        assert_eq!(measured.len(), analytic.len());
        for (a, b) in measured.values().iter().zip(analytic.values()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn knee_sinusoid_matches_analytic_angle() {
        let spec = SynthSpec {
            duration_s: 10.0,
            ..SynthSpec::default()
        };
        let (pose, analytic) = synth_pose(&spec).unwrap();
        assert_eq!(pose.n_frames(), 300);
        assert_eq!(analytic.len(), 300);
        check_oracle(&spec);
        // the right knee follows as well
        let def = AngleCatalog::default().definition("knee_angle_r").unwrap().clone();
        let right = joint_angle(&pose, &def).unwrap();
        assert!((right.values()[7] - analytic.values()[7]).abs() < 1e-9);
    }

    #[test]
    fn elbow_and_constant_motions() {
        check_oracle(&SynthSpec {
            motion: Motion::SinusoidElbow,
            amplitude_deg: 80.0,
            seed: 9,
            ..SynthSpec::default()
        });
        let constant = SynthSpec {
            motion: Motion::ConstantPose,
            ..SynthSpec::default()
        };
        check_oracle(&constant);
        let (_, analytic) = synth_pose(&constant).unwrap();
        assert!(analytic.values().iter().all(|&v| v == 90.0));
    }

    #[test]
    fn zero_amplitude_is_constant_ninety() {
        let spec = SynthSpec {
            amplitude_deg: 0.0,
            ..SynthSpec::default()
        };
        let (_, analytic) = synth_pose(&spec).unwrap();
        assert!(analytic.values().iter().all(|&v| v == 90.0));
        assert!(SynthSpec { amplitude_deg: 91.0, ..spec }.validate().is_err());
        assert!(SynthSpec { rate_hz: 0.0, ..spec }.validate().is_err());
    }

    #[test]
    fn identity_corruption_is_a_copy() {
        let (pose, analytic) = synth_pose(&SynthSpec::default()).unwrap();
        let spec = CorruptionSpec::default();
        assert!(spec.is_identity());
        assert_eq!(corrupt_series(&analytic, &spec).unwrap(), analytic);
        assert_eq!(corrupt_pose(&pose, &spec).unwrap(), pose);
    }

    #[test]
    fn lag_is_recovered_by_alignment() {
        let truth = SynthSpec::default().analytic_series(30.0).unwrap();
        for lag in [-7, 7] {
            let lagged = corrupt_series(
                &truth,
                &CorruptionSpec {
                    lag_samples: lag,
                    ..Default::default()
                },
            )
            .unwrap();
            let r = best_offset(&truth, &lagged, &AlignmentConfig::default()).unwrap();
            assert_eq!(r.offset, lag);
        }
    }

    #[test]
    fn dropout_is_deterministic() {
        let truth = SynthSpec::default().analytic_series(30.0).unwrap();
        let spec = CorruptionSpec {
            dropout_prob: 0.2,
            seed: 5,
            ..Default::default()
        };
        let a = corrupt_series(&truth, &spec).unwrap();
        let b = corrupt_series(&truth, &spec).unwrap();
        assert_eq!(a.mask(), b.mask());
        let dropped = a.mask().iter().filter(|v| !**v).count();
        assert!((60..180).contains(&dropped), "{dropped}");
        // adding noise keeps the dropout pattern
        let noisy = corrupt_series(&truth, &CorruptionSpec { noise_std_deg: 1.0, ..spec }).unwrap();
        assert_eq!(noisy.mask(), a.mask());
    }

    #[test]
    fn noise_has_requested_spread() {
        let zero = AngleSeries::from_values("x", Provenance::Synthetic, 30.0, vec![0.0; 20_000]).unwrap();
        let spec = CorruptionSpec {
            noise_std_deg: 0.5,
            seed: 3,
            ..Default::default()
        };
        let noisy = corrupt_series(&zero, &spec).unwrap();
        let n = noisy.len() as f64;
        let mean = noisy.values().iter().sum::<f64>() / n;
        let var = noisy.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.02);
        assert!((var.sqrt() - 0.5).abs() < 0.02);
    }

    #[test]
    fn pose_corruption_shifts_whole_frames() {
        let (pose, _) = synth_pose(&SynthSpec::default()).unwrap();
        let lagged = corrupt_pose(
            &pose,
            &CorruptionSpec {
                lag_samples: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(lagged.n_frames(), pose.n_frames());
        assert_eq!(lagged.point(0, 6), pose.point(0, 6));
        assert_eq!(lagged.point(10, 6), pose.point(7, 6));
        assert!(corrupt_pose(&pose, &CorruptionSpec { lag_samples: 16, ..Default::default() }).is_err());
    }

    #[test]
    fn fixture_is_self_contained_and_readable() {
        let dir = tempfile::tempdir().unwrap();
        let manifest_path = emit_fixture(&benchmark_bundle(), dir.path()).unwrap();
        let manifest = load_manifest(&manifest_path).unwrap();
        assert_eq!(manifest.trials.len(), 4);
        for t in &manifest.trials {
            assert!(t.pose_file_path.starts_with(dir.path()));
            assert!(t.imu_file_path.starts_with(dir.path()));
        }
        let text = std::fs::read_to_string(&manifest.trials[0].imu_file_path).unwrap();
        let table = parse_mot(&text).unwrap();
        assert_eq!(table.n_rows(), 1000);
        let imu = extract_imu_angle(&table, "knee_angle_l", 50.0).unwrap();
        let truth = SynthSpec::default().analytic_series(50.0).unwrap();
        for (a, b) in imu.values().iter().zip(truth.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
