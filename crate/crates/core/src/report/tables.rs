//! Summary tables as Markdown (`mean ± std`, two decimals) or CSV (separate
//! mean, std and count columns at full precision).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kinematics::activity_legend;
use crate::metrics::{Cell, Grouping, Metric, SummaryTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Markdown => "md",
        }
    }
}

/// `summary_<grouping>.<ext>`.
pub fn summary_file_name(grouping: Grouping, format: TableFormat) -> String {
    format!("summary_{}.{}", grouping.key(), format.extension())
}

fn fixed2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn md_cell(cell: Option<&Cell>) -> String {
    match cell {
        Some(c) => format!("{} ± {}", fixed2(c.mean), fixed2(c.std)),
        None => "n/a".into(),
    }
}

fn md_escape(text: &str) -> String {
    text.replace('|', "\\|")
}

fn md_row(out: &mut String, cells: &[String]) {
    out.push('|');
    for c in cells {
        let _ = write!(out, " {} |", md_escape(c));
    }
    out.push('\n');
}

fn md_rule(out: &mut String, n: usize) {
    out.push('|');
    for _ in 0..n {
        out.push_str(" --- |");
    }
    out.push('\n');
}

fn metric_heading(metric: Metric) -> String {
    match metric.unit() {
        Some(u) => format!("{} ({u})", metric.label()),
        None => metric.label().to_string(),
    }
}

/// Models as rows, metrics as columns.
fn overall_markdown(table: &SummaryTable) -> String {
    let mut out = String::new();
    let mut header = vec!["Model".to_string()];
    header.extend(Metric::ALL.iter().map(|&m| metric_heading(m)));
    md_row(&mut out, &header);
    md_rule(&mut out, header.len());
    for model in table.models() {
        let row = table.row(model, None);
        let mut cells = vec![model.to_string()];
        cells.extend(
            Metric::ALL
                .iter()
                .map(|&m| md_cell(row.and_then(|r| r.cell(m)))),
        );
        md_row(&mut out, &cells);
    }
    out
}

/// Activities as rows, models as columns, for one metric.
pub fn activity_metric_markdown(table: &SummaryTable, metric: Metric) -> String {
    let models = table.models();
    let mut out = String::new();
    let mut header = vec!["ID".to_string(), "Legend".to_string()];
    header.extend(models.iter().map(|m| m.to_string()));
    md_row(&mut out, &header);
    md_rule(&mut out, header.len());
    for activity in table.activities() {
        let mut cells = vec![
            activity.to_string(),
            activity_legend(activity).unwrap_or("").to_string(),
        ];
        cells.extend(models.iter().map(|m| {
            md_cell(
                table
                    .row(m, Some(activity))
                    .and_then(|r| r.cell(metric)),
            )
        }));
        md_row(&mut out, &cells);
    }
    out
}

fn per_activity_markdown(table: &SummaryTable) -> String {
    let mut out = String::new();
    for (i, metric) in Metric::ALL.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "## {}\n", metric_heading(*metric));
        out.push_str(&activity_metric_markdown(table, *metric));
    }
    out
}

fn csv_header(leading: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = leading.iter().map(|s| s.to_string()).collect();
    for m in Metric::ALL {
        for part in ["mean", "std", "n"] {
            h.push(format!("{}_{part}", m.key()));
        }
    }
    h
}

fn csv_cells(cells: &[Option<Cell>; 5]) -> Vec<String> {
    cells
        .iter()
        .flat_map(|c| match c {
            Some(c) => [c.mean.to_string(), c.std.to_string(), c.count.to_string()],
            None => [String::new(), String::new(), "0".to_string()],
        })
        .collect()
}

fn table_csv(table: &SummaryTable) -> Result<String> {
    let per_activity = table.grouping == Grouping::PerActivityPerModel;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    if per_activity {
        w.write_record(csv_header(&["activity_id", "model"]))?;
    } else {
        w.write_record(csv_header(&["model"]))?;
    }
    for row in &table.rows {
        let mut rec = Vec::new();
        if per_activity {
            rec.push(row.activity.clone().unwrap_or_default());
        }
        rec.push(row.model.clone());
        rec.extend(csv_cells(&row.cells));
        w.write_record(rec)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Plot(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Renders a summary table. Overall groupings give one row per model;
/// the per-activity grouping gives one section per metric in Markdown.
pub fn render_summary_table(table: &SummaryTable, format: TableFormat) -> Result<String> {
    match (format, table.grouping) {
        (TableFormat::Csv, _) => table_csv(table),
        (TableFormat::Markdown, Grouping::PerActivityPerModel) => Ok(per_activity_markdown(table)),
        (TableFormat::Markdown, _) => Ok(overall_markdown(table)),
    }
}

/// Writes `summary_<grouping>.<ext>` under `dir` and returns its path.
pub fn write_summary_table(table: &SummaryTable, format: TableFormat, dir: &Path) -> Result<PathBuf> {
    let path = dir.join(summary_file_name(table.grouping, format));
    let text = render_summary_table(table, format)?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
