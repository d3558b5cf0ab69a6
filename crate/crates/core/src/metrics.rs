//! Agreement metrics between a reference signal `y` (IMU) and an estimate
//! `yhat` (video), and their aggregation into summary tables.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::align::AlignmentResult;
use crate::error::{Error, Result};
use crate::kinematics::AngleSeries;

fn check_lengths(y: &[f64], yhat: &[f64]) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(Error::LengthMismatch(y.len(), yhat.len()));
    }
    if y.is_empty() {
        return Err(Error::EmptySignal);
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sum_sq_dev(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

/// Root mean squared error.
pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_lengths(y, yhat)?;
    let ss: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / y.len() as f64).sqrt())
}

/// RMSE divided by the range of the reference.
pub fn nrmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    let e = rmse(y, yhat)?;
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    if range <= 0.0 {
        return Err(Error::ZeroRange);
    }
    Ok(e / range)
}

/// Mean absolute error.
pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_lengths(y, yhat)?;
    let s: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum();
    Ok(s / y.len() as f64)
}

/// Pearson correlation coefficient, clamped to `[-1, 1]`.
pub fn pearson(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_lengths(y, yhat)?;
    let (my, mh) = (mean(y), mean(yhat));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in y.iter().zip(yhat) {
        let (da, db) = (a - my, b - mh);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Coefficient of determination of `yhat` as a predictor of `y`. Negative
/// when `yhat` does worse than the mean of `y`.
pub fn r2(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_lengths(y, yhat)?;
    let ss_tot = sum_sq_dev(y);
    if ss_tot <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let ss_res: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Rmse,
    Mae,
    Nrmse,
    Pearson,
    R2,
}

impl Metric {
    /// Column order of the overall summary table.
    pub const ALL: [Metric; 5] = [
        Metric::Rmse,
        Metric::Mae,
        Metric::Nrmse,
        Metric::Pearson,
        Metric::R2,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::Mae => "mae",
            Metric::Nrmse => "nrmse",
            Metric::Pearson => "pearson",
            Metric::R2 => "r2",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Rmse => "RMSE",
            Metric::Mae => "MAE",
            Metric::Nrmse => "NRMSE",
            Metric::Pearson => "Correlation",
            Metric::R2 => "R²",
        }
    }

    pub fn unit(self) -> Option<&'static str> {
        match self {
            Metric::Rmse | Metric::Mae => Some("deg"),
            _ => None,
        }
    }

    pub fn lower_is_better(self) -> bool {
        matches!(self, Metric::Rmse | Metric::Mae | Metric::Nrmse)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.key() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::schema("metric", format!("unknown metric `{s}`")))
    }
}

/// Identifies one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialIds {
    pub subject_id: String,
    pub activity_id: String,
    pub model: String,
}

/// One CSV row of results. Absent metrics (degenerate signals) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub subject_id: String,
    pub activity_id: String,
    pub model: String,
    pub rmse: Option<f64>,
    pub nrmse: Option<f64>,
    pub mae: Option<f64>,
    pub pearson: Option<f64>,
    pub r2: Option<f64>,
    pub n_samples: usize,
    pub offset: Option<i64>,
    pub fit_rmse: Option<f64>,
}

impl MetricsRecord {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Rmse => self.rmse,
            Metric::Mae => self.mae,
            Metric::Nrmse => self.nrmse,
            Metric::Pearson => self.pearson,
            Metric::R2 => self.r2,
        }
    }

    pub fn with_alignment(mut self, alignment: &AlignmentResult) -> Self {
        self.offset = Some(alignment.offset);
        self.fit_rmse = Some(alignment.fit_rmse);
        self
    }
}

/// Degenerate-signal errors become absent metrics; anything else propagates.
fn optional(result: Result<f64>) -> Result<Option<f64>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::ZeroRange | Error::ZeroVariance) => Ok(None),
        Err(e) => Err(e),
    }
}

/// All five metrics on an aligned pair. `reference` plays the role of `y`.
pub fn evaluate_trial(
    reference: &AngleSeries,
    estimate: &AngleSeries,
    ids: &TrialIds,
) -> Result<MetricsRecord> {
    if !reference.is_fully_valid() || !estimate.is_fully_valid() {
        return Err(Error::NotFullyValid);
    }
    let (y, yhat) = (reference.values(), estimate.values());
    check_lengths(y, yhat)?;
    if y.len() < 2 {
        return Err(Error::InsufficientOverlap(y.len()));
    }
    Ok(MetricsRecord {
        subject_id: ids.subject_id.clone(),
        activity_id: ids.activity_id.clone(),
        model: ids.model.clone(),
        rmse: Some(rmse(y, yhat)?),
        nrmse: optional(nrmse(y, yhat))?,
        mae: Some(mae(y, yhat)?),
        pearson: optional(pearson(y, yhat))?,
        r2: optional(r2(y, yhat))?,
        n_samples: y.len(),
        offset: None,
        fit_rmse: None,
    })
}

pub fn write_records_csv(records: &[MetricsRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<MetricsRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let expected = [
        "subject_id",
        "activity_id",
        "model",
        "rmse",
        "nrmse",
        "mae",
        "pearson",
        "r2",
        "n_samples",
        "offset",
        "fit_rmse",
    ];
    let header = rdr.headers()?.clone();
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::schema(
            "records header",
            format!("expected `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize().enumerate() {
        let record: MetricsRecord =
            row.map_err(|e| Error::schema(format!("records row {}", i + 2), e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// One row per (activity, model).
    PerActivityPerModel,
    /// One row per model, pooling every (subject, activity) record.
    OverallPerModel,
    /// One row per model over the per-activity means.
    OverallOfActivityMeans,
}

impl Grouping {
    pub fn key(self) -> &'static str {
        match self {
            Grouping::PerActivityPerModel => "per_activity_per_model",
            Grouping::OverallPerModel => "overall_per_model",
            Grouping::OverallOfActivityMeans => "overall_of_activity_means",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdFlavor {
    /// Divisor `n`.
    #[default]
    Population,
    /// Divisor `n - 1`; zero for a single value.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Cell {
    pub fn from_values(values: &[f64], flavor: StdFlavor) -> Option<Cell> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let m = mean(values);
        let ss = sum_sq_dev(values);
        let divisor = match flavor {
            StdFlavor::Population => n as f64,
            StdFlavor::Sample if n > 1 => (n - 1) as f64,
            StdFlavor::Sample => 1.0,
        };
        Some(Cell {
            mean: m,
            std: (ss / divisor).sqrt(),
            count: n,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub model: String,
    pub activity: Option<String>,
    /// Indexed like [`Metric::ALL`].
    pub cells: [Option<Cell>; 5],
}

impl SummaryRow {
    pub fn cell(&self, metric: Metric) -> Option<&Cell> {
        let i = Metric::ALL.iter().position(|&m| m == metric)?;
        self.cells[i].as_ref()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub grouping: Grouping,
    pub flavor: StdFlavor,
    /// Sorted by (activity, model); overall tables by model.
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// Models in row order, deduplicated.
    pub fn models(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.rows.iter().map(|r| r.model.as_str()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn activities(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.rows.iter().filter_map(|r| r.activity.as_deref()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn row(&self, model: &str, activity: Option<&str>) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.activity.as_deref() == activity)
    }
}

fn summarize<'a, I>(records: I, flavor: StdFlavor) -> [Option<Cell>; 5]
where
    I: IntoIterator<Item = &'a MetricsRecord> + Clone,
{
    Metric::ALL.map(|m| {
        let values: Vec<f64> = records.clone().into_iter().filter_map(|r| r.get(m)).collect();
        Cell::from_values(&values, flavor)
    })
}

/// Mean and standard deviation of every metric per group. Absent metrics do
/// not count towards their cell.
pub fn aggregate(
    records: &[MetricsRecord],
    grouping: Grouping,
    flavor: StdFlavor,
) -> Result<SummaryTable> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut by_key: BTreeMap<(Option<&str>, &str), Vec<&MetricsRecord>> = BTreeMap::new();
    let per_activity = grouping != Grouping::OverallPerModel;
    for r in records {
        let activity = per_activity.then_some(r.activity_id.as_str());
        by_key.entry((activity, r.model.as_str())).or_default().push(r);
    }

    let rows: Vec<SummaryRow> = by_key
        .iter()
        .map(|((activity, model), group)| SummaryRow {
            model: model.to_string(),
            activity: activity.map(str::to_string),
            cells: summarize(group.iter().copied(), flavor),
        })
        .collect();

    let rows = match grouping {
        Grouping::PerActivityPerModel | Grouping::OverallPerModel => rows,
        Grouping::OverallOfActivityMeans => {
            let mut by_model: BTreeMap<&str, Vec<&SummaryRow>> = BTreeMap::new();
            for row in &rows {
                by_model.entry(row.model.as_str()).or_default().push(row);
            }
            by_model
                .into_iter()
                .map(|(model, group)| {
                    let cells = std::array::from_fn(|i| {
                        let means: Vec<f64> =
                            group.iter().filter_map(|r| r.cells[i].map(|c| c.mean)).collect();
                        Cell::from_values(&means, flavor)
                    });
                    SummaryRow {
                        model: model.to_string(),
                        activity: None,
                        cells,
                    }
                })
                .collect()
        }
    };
    Ok(SummaryTable {
        grouping,
        flavor,
        rows,
    })
}
