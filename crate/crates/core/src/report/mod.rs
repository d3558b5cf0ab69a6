//! Summary tables and SVG figures.

mod svg;
mod tables;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub use svg::{
    normalize_summary, normalized_summary_bars, plot_metric_bars, plot_overlay,
    render_metric_bars, render_normalized_summary, render_overlay, NormalizedSummary, Palette,
    PlotKind, PlotSpec, PALETTE_ENV,
};
pub use tables::{
    activity_metric_markdown, render_summary_table, summary_file_name, write_summary_table,
    TableFormat,
};

use crate::error::{Error, Result};
use crate::metrics::{aggregate, Grouping, Metric, MetricsRecord, StdFlavor};

/// Name of the normalized model comparison figure.
pub const NORMALIZED_SUMMARY_FILE: &str = "summary_normalized.svg";

/// `<activity>_<metric>.svg`.
pub fn metric_bars_file_name(activity_id: &str, metric: Metric) -> String {
    format!("{activity_id}_{}.svg", metric.key())
}

/// `overlay_<subject>_<activity>.svg`.
pub fn overlay_file_name(subject_id: &str, activity_id: &str) -> String {
    format!("overlay_{subject_id}_{activity_id}.svg")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub flavor: StdFlavor,
    /// Pooling of the overall table.
    pub overall: Grouping,
    pub palette: Palette,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            flavor: StdFlavor::Population,
            overall: Grouping::OverallPerModel,
            palette: Palette::default(),
        }
    }
}

/// Writes every output derived from records alone: per-activity and overall
/// tables in both formats, per-activity metric bars, and the normalized
/// summary when there are at least two models. Returns the written paths in
/// a fixed order.
pub fn write_aggregate_outputs(
    records: &[MetricsRecord],
    opts: &ReportOptions,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    if opts.overall == Grouping::PerActivityPerModel {
        return Err(Error::schema(
            "overall_aggregation",
            "overall table needs an overall grouping",
        ));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let per_activity = aggregate(records, Grouping::PerActivityPerModel, opts.flavor)?;
    let overall = aggregate(records, opts.overall, opts.flavor)?;
    for table in [&per_activity, &overall] {
        for format in [TableFormat::Csv, TableFormat::Markdown] {
            written.push(write_summary_table(table, format, dir)?);
        }
    }

    let mut by_activity: BTreeMap<&str, Vec<MetricsRecord>> = BTreeMap::new();
    for r in records {
        by_activity
            .entry(r.activity_id.as_str())
            .or_default()
            .push(r.clone());
    }
    for (activity, group) in &by_activity {
        for metric in Metric::ALL {
            let spec = PlotSpec::new(
                PlotKind::MetricBars,
                format!("{activity}: {} per subject and model", metric.label()),
            );
            let path = dir.join(metric_bars_file_name(activity, metric));
            plot_metric_bars(group, metric, &spec, &opts.palette, &path)?;
            written.push(path);
        }
    }

    if overall.models().len() >= 2 {
        let spec = PlotSpec::new(PlotKind::SummaryBars, "Min-max normalized metrics per model");
        let path = dir.join(NORMALIZED_SUMMARY_FILE);
        normalized_summary_bars(&overall, &spec, &opts.palette, &path)?;
        written.push(path);
    }
    Ok(written)
}
