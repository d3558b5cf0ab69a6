//! Integer-lag synchronization of a video-derived series to the IMU reference.
//!
//! Offset convention: a positive offset `k` means the estimate lags the
//! reference, i.e. `est[i + k]` pairs with `ref[i]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::AngleSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignmentConfig {
    /// Samples of overlap over which the fit RMSE is evaluated.
    pub fit_window: usize,
    /// Largest shift tried in either direction.
    pub max_offset: usize,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            fit_window: 180,
            max_offset: 15,
        }
    }
}

impl AlignmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fit_window < 2 {
            return Err(Error::schema(
                "alignment_config.fit_window",
                "must be at least 2",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub offset: i64,
    pub fit_rmse: f64,
    pub aligned_length: usize,
}

/// Index ranges paired at `offset`: `(ref_start, est_start, len)`.
fn overlap(ref_len: usize, est_len: usize, offset: i64) -> (usize, usize, usize) {
    let ref_start = if offset < 0 { offset.unsigned_abs() as usize } else { 0 };
    let est_start = if offset > 0 { offset as usize } else { 0 };
    let len = ref_len
        .saturating_sub(ref_start)
        .min(est_len.saturating_sub(est_start));
    (ref_start, est_start, len)
}

fn rmse_slice(a: &[f64], b: &[f64]) -> f64 {
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (ss / a.len() as f64).sqrt()
}

fn check_pair(reference: &AngleSeries, estimate: &AngleSeries) -> Result<()> {
    if reference.sample_rate_hz() != estimate.sample_rate_hz() {
        return Err(Error::RateMismatch(
            reference.sample_rate_hz(),
            estimate.sample_rate_hz(),
        ));
    }
    if !reference.is_fully_valid() || !estimate.is_fully_valid() {
        return Err(Error::NotFullyValid);
    }
    Ok(())
}

/// Candidate offsets in tie-break order: 0, -1, 1, -2, 2, ...
fn candidates(max_offset: usize) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=max_offset as i64).flat_map(|k| [-k, k]))
}

/// Exhaustive search over `[-max_offset, max_offset]` for the shift that
/// minimises the RMSE over the first `fit_window` samples of the overlap.
///
/// Ties go to the smaller `|offset|`, then to the negative one. Candidates
/// whose overlap is shorter than two samples are skipped.
pub fn best_offset(
    reference: &AngleSeries,
    estimate: &AngleSeries,
    cfg: &AlignmentConfig,
) -> Result<AlignmentResult> {
    check_pair(reference, estimate)?;
    cfg.validate()?;
    let (r, e) = (reference.values(), estimate.values());

    let mut best: Option<AlignmentResult> = None;
    let mut longest = 0;
    for k in candidates(cfg.max_offset) {
        let (rs, es, len) = overlap(r.len(), e.len(), k);
        longest = longest.max(len);
        if len < 2 {
            continue;
        }
        let w = cfg.fit_window.min(len);
        let score = rmse_slice(&r[rs..rs + w], &e[es..es + w]);
        // strict comparison keeps the earlier candidate on ties
        if best.is_none_or(|b| score < b.fit_rmse) {
            best = Some(AlignmentResult {
                offset: k,
                fit_rmse: score,
                aligned_length: len,
            });
        }
    }
    best.ok_or(Error::InsufficientOverlap(longest))
}

/// Shifts `estimate` by `offset` and trims both series to their common
/// support. Index `i` of both outputs refers to the same instant.
pub fn apply_offset_and_trim(
    reference: &AngleSeries,
    estimate: &AngleSeries,
    offset: i64,
) -> Result<(AngleSeries, AngleSeries)> {
    check_pair(reference, estimate)?;
    let (rs, es, len) = overlap(reference.len(), estimate.len(), offset);
    if len < 2 {
        return Err(Error::InsufficientOverlap(len));
    }
    Ok((reference.slice(rs, len), estimate.slice(es, len)))
}

/// First reference index covered by the trimmed pair at `offset`.
pub fn reference_start(offset: i64) -> usize {
    overlap(usize::MAX, usize::MAX, offset).0
}
