//! JSON run manifest. Relative paths resolve against the manifest's
//! directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::align::AlignmentConfig;
use crate::dsp::FilterConfig;
use crate::error::{Error, Result};
use crate::ingest::convert::ModelKind;
use crate::kinematics::AngleCatalog;
use crate::metrics::{Grouping, StdFlavor};

pub const DEFAULT_VIDEO_RATE_HZ: f64 = 30.0;
pub const DEFAULT_IMU_RATE_HZ: f64 = 50.0;

fn default_video_rate() -> f64 {
    DEFAULT_VIDEO_RATE_HZ
}

fn default_imu_rate() -> f64 {
    DEFAULT_IMU_RATE_HZ
}

fn default_model_kind() -> String {
    ModelKind::H36m17Generic.name().to_string()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialSpec {
    pub subject_id: String,
    pub activity_id: String,
    pub model_name: String,
    pub pose_file_path: PathBuf,
    pub imu_file_path: PathBuf,
    /// Defaults to the angle evaluated for the activity.
    #[serde(default)]
    pub imu_column_name: Option<String>,
    #[serde(default = "default_video_rate")]
    pub video_rate_hz: f64,
    #[serde(default = "default_imu_rate")]
    pub imu_rate_hz: f64,
    #[serde(default)]
    pub harmonization_map_path: Option<PathBuf>,
    #[serde(default = "default_model_kind")]
    pub model_kind: String,
}

/// How the overall table pools records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverallAggregation {
    /// Mean over every (subject, activity) record of a model.
    #[default]
    Trials,
    /// Mean over the model's per-activity means.
    ActivityMeans,
}

impl OverallAggregation {
    pub fn grouping(self) -> Grouping {
        match self {
            OverallAggregation::Trials => Grouping::OverallPerModel,
            OverallAggregation::ActivityMeans => Grouping::OverallOfActivityMeans,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialManifest {
    pub trials: Vec<TrialSpec>,
    #[serde(default)]
    pub filter_config: FilterConfig,
    #[serde(default)]
    pub alignment_config: AlignmentConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Standard deviation flavour for summary tables.
    #[serde(default)]
    pub std_flavor: StdFlavor,
    #[serde(default)]
    pub overall_aggregation: OverallAggregation,
    /// Optional `name: m1,m2,m3,m4` / `Axx: angle` overrides.
    #[serde(default)]
    pub angle_config_path: Option<PathBuf>,
}

impl TrialManifest {
    /// Angle catalogue with the manifest's overrides applied.
    pub fn catalog(&self) -> Result<AngleCatalog> {
        match &self.angle_config_path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                AngleCatalog::with_overrides(&text)
            }
            None => Ok(AngleCatalog::default()),
        }
    }
}

fn resolve(base: &Path, path: &Path) -> Result<PathBuf> {
    let full = if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    };
    if full.exists() {
        Ok(full)
    } else {
        Err(Error::UnresolvablePath(full))
    }
}

fn check_rate(field: String, rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::schema(field, format!("rate must be positive, got {rate}")))
    }
}

/// Parses manifest JSON, resolving paths against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<TrialManifest> {
    let mut manifest: TrialManifest = serde_json::from_str(text).map_err(|e| {
        let field = if e.is_data() { "manifest" } else { "json" };
        Error::schema(field, e.to_string())
    })?;

    manifest
        .filter_config
        .validate()
        .map_err(|e| Error::schema("filter_config", e.to_string()))?;
    manifest.alignment_config.validate()?;
    if let Some(p) = &manifest.angle_config_path {
        manifest.angle_config_path = Some(resolve(base, p)?);
    }
    if manifest.output_dir.is_relative() {
        manifest.output_dir = base.join(&manifest.output_dir);
    }
    let catalog = manifest.catalog()?;

    for (i, trial) in manifest.trials.iter_mut().enumerate() {
        let angle = catalog.activities().angle_for(&trial.activity_id)?;
        check_rate(format!("trials[{i}].video_rate_hz"), trial.video_rate_hz)?;
        check_rate(format!("trials[{i}].imu_rate_hz"), trial.imu_rate_hz)?;
        if trial.imu_column_name.is_none() {
            trial.imu_column_name = Some(angle.to_string());
        }
        trial.pose_file_path = resolve(base, &trial.pose_file_path)?;
        trial.imu_file_path = resolve(base, &trial.imu_file_path)?;
        if let Some(p) = &trial.harmonization_map_path {
            trial.harmonization_map_path = Some(resolve(base, p)?);
        } else {
            trial
                .model_kind
                .parse::<ModelKind>()
                .map_err(|e| Error::schema(format!("trials[{i}].model_kind"), e.to_string()))?;
        }
    }
    Ok(manifest)
}

pub fn load_manifest(path: &Path) -> Result<TrialManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest(&text, base)
}
