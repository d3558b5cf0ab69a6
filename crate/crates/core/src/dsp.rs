//! Signal conditioning shared by the video and IMU branches: gap
//! interpolation, median and moving-average smoothing, resampling and mean
//! removal.
//!
//! Both filters pad the signal by replicating its first and last samples, so
//! output length always equals input length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::AngleSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub median_window: usize,
    pub mavg_window: usize,
    pub target_rate_hz: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            median_window: 5,
            mavg_window: 5,
            target_rate_hz: 30.0,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.median_window == 0 || self.mavg_window == 0 {
            return Err(Error::ZeroWindow);
        }
        if self.median_window.is_multiple_of(2) {
            return Err(Error::EvenWindow(self.median_window));
        }
        if !(self.target_rate_hz > 0.0 && self.target_rate_hz.is_finite()) {
            return Err(Error::InvalidRate(self.target_rate_hz));
        }
        Ok(())
    }
}

fn require_valid(series: &AngleSeries) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptySignal);
    }
    if !series.is_fully_valid() {
        return Err(Error::NotFullyValid);
    }
    Ok(())
}

/// Fills invalid samples. Interior gaps are bridged linearly between the
/// nearest valid neighbours; leading and trailing gaps repeat the nearest
/// valid value.
pub fn interpolate_gaps(series: &AngleSeries) -> Result<AngleSeries> {
    let values = series.values();
    let mask = series.mask();
    let anchors: Vec<usize> = (0..values.len()).filter(|&i| mask[i]).collect();
    let (&first, &last) = match (anchors.first(), anchors.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::EmptySignal),
    };

    let mut out = values.to_vec();
    out[..first].fill(values[first]);
    out[last + 1..].fill(values[last]);
    for pair in anchors.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a < 2 {
            continue;
        }
        let (ya, yb) = (values[a], values[b]);
        let span = (b - a) as f64;
        for (i, slot) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            let frac = (i - a) as f64 / span;
            *slot = ya + (yb - ya) * frac;
        }
    }
    Ok(series.with_values(out))
}

fn check_window(window: usize, len: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::ZeroWindow);
    }
    if window > len {
        return Err(Error::WindowTooLarge { window, len });
    }
    Ok(())
}

/// Sample at `i` with replicate padding outside `0..len`.
fn padded(values: &[f64], i: isize) -> f64 {
    let last = values.len() as isize - 1;
    values[i.clamp(0, last) as usize]
}

/// Centred running median over an odd window.
pub fn median_filter(series: &AngleSeries, window: usize) -> Result<AngleSeries> {
    require_valid(series)?;
    if window.is_multiple_of(2) {
        return Err(Error::EvenWindow(window));
    }
    check_window(window, series.len())?;

    let values = series.values();
    let half = (window / 2) as isize;
    let mut buf = vec![0.0; window];
    let out = (0..values.len() as isize)
        .map(|i| {
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = padded(values, i - half + k as isize);
            }
            buf.sort_unstable_by(f64::total_cmp);
            buf[window / 2]
        })
        .collect();
    Ok(series.with_values(out))
}

/// Centred running mean. For an even window the extra sample is taken from
/// the past: offsets `-w/2 ..= w/2 - 1`.
pub fn moving_average(series: &AngleSeries, window: usize) -> Result<AngleSeries> {
    require_valid(series)?;
    check_window(window, series.len())?;

    let values = series.values();
    let back = (window / 2) as isize;
    let out = (0..values.len() as isize)
        .map(|i| {
            // averaging deviations from one window sample keeps constants exact
            let base = padded(values, i - back);
            let sum: f64 = (0..window as isize)
                .map(|k| padded(values, i - back + k) - base)
                .sum();
            base + sum / window as f64
        })
        .collect();
    Ok(series.with_values(out))
}

/// Linear resampling onto `t_k = k / target_rate_hz`, for every `t_k` inside
/// the source span `[0, (n - 1) / source_rate]`.
pub fn resample(series: &AngleSeries, target_rate_hz: f64) -> Result<AngleSeries> {
    require_valid(series)?;
    if !(target_rate_hz > 0.0 && target_rate_hz.is_finite()) {
        return Err(Error::InvalidRate(target_rate_hz));
    }
    let values = series.values();
    let last = (values.len() - 1) as f64;
    let ratio = series.sample_rate_hz() / target_rate_hz;

    let mut out = Vec::new();
    for k in 0usize.. {
        // source position of t_k, in samples
        let pos = k as f64 * ratio;
        if pos > last + 1e-9 {
            break;
        }
        let lo = (pos.floor() as usize).min(values.len() - 1);
        let frac = pos - lo as f64;
        let y = if lo + 1 < values.len() && frac > 0.0 {
            values[lo] + (values[lo + 1] - values[lo]) * frac
        } else {
            values[lo]
        };
        out.push(y);
    }
    series.with_values(out).with_rate(target_rate_hz)
}

/// Subtracts the arithmetic mean.
pub fn mean_remove(series: &AngleSeries) -> Result<AngleSeries> {
    require_valid(series)?;
    let values = series.values();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut out: Vec<f64> = values.iter().map(|v| v - mean).collect();
    // a second pass absorbs the rounding left by the first
    let residual = out.iter().sum::<f64>() / out.len() as f64;
    out.iter_mut().for_each(|v| *v -= residual);
    Ok(series.with_values(out))
}

/// interpolate → resample when off the target rate → median → moving
/// average → mean removal.
pub fn condition_video(series: &AngleSeries, cfg: &FilterConfig) -> Result<AngleSeries> {
    cfg.validate()?;
    let filled = interpolate_gaps(series)?;
    let filled = if filled.sample_rate_hz() != cfg.target_rate_hz {
        resample(&filled, cfg.target_rate_hz)?
    } else {
        filled
    };
    smooth_and_center(&filled, cfg)
}

/// interpolate → resample → median → moving average → mean removal.
pub fn condition_imu(series: &AngleSeries, cfg: &FilterConfig) -> Result<AngleSeries> {
    cfg.validate()?;
    let filled = interpolate_gaps(series)?;
    let resampled = resample(&filled, cfg.target_rate_hz)?;
    smooth_and_center(&resampled, cfg)
}

fn smooth_and_center(series: &AngleSeries, cfg: &FilterConfig) -> Result<AngleSeries> {
    let med = median_filter(series, cfg.median_window)?;
    let avg = moving_average(&med, cfg.mavg_window)?;
    mean_remove(&avg)
}
