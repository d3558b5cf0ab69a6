//! One trial end to end: pose file and `.mot` reference in, aligned signals
//! and a metrics record out.

use crate::align::{apply_offset_and_trim, best_offset, reference_start, AlignmentConfig, AlignmentResult};
use crate::dsp::{condition_imu, condition_video, FilterConfig};
use crate::error::Result;
use crate::ingest::{extract_imu_angle, load_model_pose, read_mot, TrialSpec};
use crate::kinematics::{joint_angle, AngleCatalog, AngleSeries, Provenance};
use crate::metrics::{evaluate_trial, MetricsRecord, TrialIds};

/// Settings shared by every trial of a run.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub filter: FilterConfig,
    pub alignment: AlignmentConfig,
    pub catalog: AngleCatalog,
}

/// Aligned, conditioned signals of one trial plus its metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub record: MetricsRecord,
    pub alignment: AlignmentResult,
    /// Conditioned IMU series over its full length.
    pub reference_full: AngleSeries,
    /// Reference and estimate trimmed to their common support.
    pub reference: AngleSeries,
    pub estimate: AngleSeries,
}

impl TrialOutcome {
    /// Index range of `reference_full` covered by the aligned pair.
    pub fn reference_window(&self) -> std::ops::Range<usize> {
        let start = reference_start(self.alignment.offset);
        start..start + self.reference.len()
    }
}

/// Video branch: pose → harmonize → joint angle → conditioning.
pub fn video_angle(trial: &TrialSpec, cfg: &PipelineConfig) -> Result<AngleSeries> {
    let def = cfg.catalog.for_activity(&trial.activity_id)?;
    let required = cfg.catalog.required_joints();
    let pose = load_model_pose(
        &trial.pose_file_path,
        &trial.model_kind,
        trial.harmonization_map_path.as_deref(),
        &required,
        trial.video_rate_hz,
    )?;
    let raw = joint_angle(&pose, def)?.with_provenance(Provenance::VideoModel(trial.model_name.clone()));
    condition_video(&raw, &cfg.filter)
}

/// IMU branch: `.mot` column → conditioning at the target rate.
pub fn imu_angle(trial: &TrialSpec, cfg: &PipelineConfig) -> Result<AngleSeries> {
    let column = match &trial.imu_column_name {
        Some(c) => c.as_str(),
        None => cfg.catalog.activities().angle_for(&trial.activity_id)?,
    };
    let table = read_mot(&trial.imu_file_path)?;
    let raw = extract_imu_angle(&table, column, trial.imu_rate_hz)?;
    condition_imu(&raw, &cfg.filter)
}

pub fn process_trial(trial: &TrialSpec, cfg: &PipelineConfig) -> Result<TrialOutcome> {
    let estimate_full = video_angle(trial, cfg)?;
    let reference_full = imu_angle(trial, cfg)?;
    let alignment = best_offset(&reference_full, &estimate_full, &cfg.alignment)?;
    let (reference, estimate) = apply_offset_and_trim(&reference_full, &estimate_full, alignment.offset)?;
    let ids = TrialIds {
        subject_id: trial.subject_id.clone(),
        activity_id: trial.activity_id.clone(),
        model: trial.model_name.clone(),
    };
    let record = evaluate_trial(&reference, &estimate, &ids)?.with_alignment(&alignment);
    Ok(TrialOutcome {
        record,
        alignment,
        reference_full,
        reference,
        estimate,
    })
}

/// Reference and per-model estimates cut to the reference span that every
/// outcome covers. `None` when the spans share fewer than two samples.
pub fn overlay_window(outcomes: &[&TrialOutcome]) -> Option<(AngleSeries, Vec<(String, AngleSeries)>)> {
    let first = outcomes.first()?;
    let start = outcomes.iter().map(|o| o.reference_window().start).max()?;
    let end = outcomes.iter().map(|o| o.reference_window().end).min()?;
    if end < start + 2 {
        return None;
    }
    let reference = first.reference_full.slice(start, end - start);
    let estimates = outcomes
        .iter()
        .map(|o| {
            let offset = start - o.reference_window().start;
            (o.record.model.clone(), o.estimate.slice(offset, end - start))
        })
        .collect();
    Some((reference, estimates))
}
