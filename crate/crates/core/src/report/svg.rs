//! Self-contained SVG 1.1 figures: signal overlays, per-subject metric bars
//! and min-max normalized model summaries.
//!
//! Elements carry `class` and `data-*` attributes (`polyline.series`,
//! `rect.bar`, `g.plot`) so figures can be checked by re-parsing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kinematics::AngleSeries;
use crate::metrics::{Metric, MetricsRecord, SummaryTable};

pub const PALETTE_ENV: &str = "KINEBENCH_PALETTE";

const DEFAULT_PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const REFERENCE_COLOR: &str = "#000000";

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Overlay,
    MetricBars,
    SummaryBars,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
}

impl PlotSpec {
    pub fn new(kind: PlotKind, title: impl Into<String>) -> Self {
        let (x_label, y_label) = match kind {
            PlotKind::Overlay => ("time (s)", "angle (deg)"),
            PlotKind::MetricBars => ("subject", ""),
            PlotKind::SummaryBars => ("metric", "normalized value"),
        };
        PlotSpec {
            kind,
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 900,
            height: 450,
        }
    }

    fn check(&self) -> Result<()> {
        let min_w = (MARGIN_LEFT + MARGIN_RIGHT) as u32 + 10;
        let min_h = (MARGIN_TOP + MARGIN_BOTTOM) as u32 + 10;
        if self.width < min_w || self.height < min_h {
            return Err(Error::Plot(format!(
                "figure must be at least {min_w}x{min_h} pixels"
            )));
        }
        Ok(())
    }

    fn plot_width(&self) -> f64 {
        self.width as f64 - MARGIN_LEFT - MARGIN_RIGHT
    }

    fn plot_height(&self) -> f64 {
        self.height as f64 - MARGIN_TOP - MARGIN_BOTTOM
    }
}

/// Series colours, chosen by a stable hash of the series name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    colors: Vec<String>,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            colors: DEFAULT_PALETTE.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl Palette {
    /// One colour per line; blank lines and `#`-prefixed comments other than
    /// hex colours are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let colors: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .filter(|l| !l.starts_with('#') || is_hex_color(l))
            .map(str::to_string)
            .collect();
        if colors.is_empty() {
            return Err(Error::Plot("palette file has no colours".into()));
        }
        if let Some(bad) = colors.iter().find(|c| !is_hex_color(c)) {
            return Err(Error::Plot(format!("`{bad}` is not a #rrggbb colour")));
        }
        Ok(Palette { colors })
    }

    /// Palette file named by `KINEBENCH_PALETTE`, else the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(PALETTE_ENV) {
            Some(path) => {
                let path = PathBuf::from(path);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                Palette::parse(&text)
            }
            None => Ok(Palette::default()),
        }
    }

    pub fn color_for(&self, name: &str) -> &str {
        let idx = (fnv1a(name.as_bytes()) % self.colors.len() as u64) as usize;
        &self.colors[idx]
    }
}

fn is_hex_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].chars().all(|c| c.is_ascii_hexdigit())
}

/// 64-bit FNV-1a.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Trims a fixed-precision number, e.g. `2.500` → `2.5`, `-0.000` → `0`.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(spec: &PlotSpec) -> Self {
        let mut out = String::new();
        let (w, h) = (spec.width, spec.height);
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");
        let _ = writeln!(
            out,
            "<text class=\"title\" x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            num(w as f64 / 2.0),
            escape(&spec.title)
        );
        Canvas { out }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\"{extra}/>",
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, class: &str, text: &str) {
        let _ = writeln!(
            self.out,
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\">{}</text>",
            num(x),
            num(y),
            escape(text)
        );
    }

    fn axis_labels(&mut self, spec: &PlotSpec) {
        let cx = MARGIN_LEFT + spec.plot_width() / 2.0;
        let bottom = spec.height as f64 - 12.0;
        self.text(cx, bottom, "middle", "x-label", &spec.x_label);
        let cy = MARGIN_TOP + spec.plot_height() / 2.0;
        let _ = writeln!(
            self.out,
            "<text class=\"y-label\" x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>",
            num(cy),
            num(cy),
            escape(&spec.y_label)
        );
    }

    /// Horizontal ticks and grid lines for `lo..=hi` mapped by `to_y`.
    fn y_ticks(&mut self, spec: &PlotSpec, lo: f64, hi: f64, to_y: impl Fn(f64) -> f64) {
        let right = MARGIN_LEFT + spec.plot_width();
        for i in 0..=5 {
            let v = lo + (hi - lo) * i as f64 / 5.0;
            let y = to_y(v);
            self.line(MARGIN_LEFT, y, right, y, "#e0e0e0", "");
            self.text(MARGIN_LEFT - 6.0, y + 4.0, "end", "tick", &format!("{v:.2}"));
        }
    }

    fn frame(&mut self, spec: &PlotSpec) {
        let _ = writeln!(
            self.out,
            "<rect class=\"frame\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>",
            num(MARGIN_LEFT),
            num(MARGIN_TOP),
            num(spec.plot_width()),
            num(spec.plot_height())
        );
    }

    fn legend(&mut self, spec: &PlotSpec, entries: &[(String, String)], notes: &[String]) {
        let x = spec.width as f64 - MARGIN_RIGHT + 15.0;
        self.out.push_str("<g class=\"legend\">\n");
        let mut y = MARGIN_TOP + 10.0;
        for (label, color) in entries {
            self.line(x, y - 4.0, x + 22.0, y - 4.0, color, " stroke-width=\"3\"");
            let _ = writeln!(
                self.out,
                "<text class=\"legend-entry\" x=\"{}\" y=\"{}\">{}</text>",
                num(x + 28.0),
                num(y),
                escape(label)
            );
            y += 18.0;
        }
        for note in notes {
            y += 4.0;
            self.text(x, y, "start", "legend-note", note);
            y += 14.0;
        }
        self.out.push_str("</g>\n");
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn value_range<'a>(values: impl IntoIterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

/// Reference plus one line per model over a shared time axis.
pub fn render_overlay(
    reference: &AngleSeries,
    estimates: &[(String, AngleSeries)],
    spec: &PlotSpec,
    palette: &Palette,
) -> Result<String> {
    spec.check()?;
    let n = reference.len();
    if n < 2 {
        return Err(Error::InsufficientOverlap(n));
    }
    if let Some((_, s)) = estimates.iter().find(|(_, s)| s.len() != n) {
        return Err(Error::LengthMismatch(n, s.len()));
    }
    let rate = reference.sample_rate_hz();
    let duration = (n - 1) as f64 / rate;
    let (lo, hi) = value_range(
        reference
            .values()
            .iter()
            .chain(estimates.iter().flat_map(|(_, s)| s.values())),
    );
    let (pw, ph) = (spec.plot_width(), spec.plot_height());
    let to_x = |t: f64| MARGIN_LEFT + t / duration * pw;
    let to_y = |v: f64| MARGIN_TOP + (hi - v) / (hi - lo) * ph;

    let mut c = Canvas::new(spec);
    c.y_ticks(spec, lo, hi, to_y);
    for i in 0..=5 {
        let t = duration * i as f64 / 5.0;
        let x = to_x(t);
        c.line(x, MARGIN_TOP + ph, x, MARGIN_TOP + ph + 5.0, "#333333", "");
        c.text(x, MARGIN_TOP + ph + 18.0, "middle", "tick", &format!("{t:.1}"));
    }
    c.frame(spec);

    let mut polyline = |label: &str, color: &str, series: &AngleSeries, width: &str| {
        let points: Vec<String> = series
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{},{}", num(to_x(i as f64 / rate)), num(to_y(v))))
            .collect();
        let _ = writeln!(
            c.out,
            "<polyline class=\"series\" data-label=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>",
            escape(label),
            points.join(" ")
        );
    };
    let ref_label = reference.provenance().to_string();
    polyline(&ref_label, REFERENCE_COLOR, reference, "2");
    let mut entries = vec![(ref_label, REFERENCE_COLOR.to_string())];
    for (model, series) in estimates {
        let color = palette.color_for(model).to_string();
        polyline(model, &color, series, "1.5");
        entries.push((model.clone(), color));
    }
    c.axis_labels(spec);
    c.legend(spec, &entries, &[]);
    Ok(c.finish())
}

pub fn plot_overlay(
    reference: &AngleSeries,
    estimates: &[(String, AngleSeries)],
    spec: &PlotSpec,
    palette: &Palette,
    path: &Path,
) -> Result<()> {
    write_file(path, &render_overlay(reference, estimates, spec, palette)?)
}

/// Vertical extent shared by bar charts: always includes zero.
fn bar_axis(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-12 {
        return (0.0, 1.0);
    }
    (lo * 1.1, hi * 1.1)
}

struct BarGroup {
    label: String,
    bars: Vec<(String, Option<f64>)>,
}

fn render_bars(
    spec: &PlotSpec,
    groups: &[BarGroup],
    series_names: &[String],
    palette: &Palette,
    axis: (f64, f64),
    notes: &[String],
    group_attr: &str,
) -> String {
    let (lo, hi) = axis;
    let (pw, ph) = (spec.plot_width(), spec.plot_height());
    let to_y = |v: f64| MARGIN_TOP + (hi - v) / (hi - lo) * ph;
    let zero_y = to_y(0.0);

    let mut c = Canvas::new(spec);
    c.y_ticks(spec, lo, hi, to_y);
    c.frame(spec);
    let _ = writeln!(
        c.out,
        "<g class=\"plot\" data-y-min=\"{lo}\" data-y-max=\"{hi}\" data-plot-height=\"{}\">",
        num(ph)
    );
    let group_w = pw / groups.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series_names.len().max(1) as f64;
    for (gi, group) in groups.iter().enumerate() {
        let gx = MARGIN_LEFT + gi as f64 * group_w + group_w * 0.1;
        for (name, value) in &group.bars {
            let si = series_names.iter().position(|s| s == name).unwrap_or(0);
            let x = gx + si as f64 * bar_w;
            match value {
                Some(v) => {
                    let top = to_y(v.max(0.0));
                    let height = (to_y(v.min(0.0)) - top).abs();
                    let _ = writeln!(
                        c.out,
                        "<rect class=\"bar\" data-{group_attr}=\"{}\" data-series=\"{}\" data-value=\"{v}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                        escape(&group.label),
                        escape(name),
                        num(x),
                        num(top),
                        num(bar_w * 0.95),
                        num(height),
                        palette.color_for(name)
                    );
                }
                None => {
                    let _ = writeln!(
                        c.out,
                        "<text class=\"absent\" data-{group_attr}=\"{}\" data-series=\"{}\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"9\">n/a</text>",
                        escape(&group.label),
                        escape(name),
                        num(x + bar_w / 2.0),
                        num(zero_y - 4.0)
                    );
                }
            }
        }
        c.text(
            gx + group_w * 0.4,
            MARGIN_TOP + ph + 18.0,
            "middle",
            "tick",
            &group.label,
        );
    }
    c.out.push_str("</g>\n");
    c.line(MARGIN_LEFT, zero_y, MARGIN_LEFT + pw, zero_y, "#333333", "");
    c.axis_labels(spec);
    let entries: Vec<(String, String)> = series_names
        .iter()
        .map(|s| (s.clone(), palette.color_for(s).to_string()))
        .collect();
    c.legend(spec, &entries, notes);
    c.finish()
}

/// Grouped bars for one activity: a group per subject, a bar per model.
/// Absent metric values leave an annotated gap.
pub fn render_metric_bars(
    records: &[MetricsRecord],
    metric: Metric,
    spec: &PlotSpec,
    palette: &Palette,
) -> Result<String> {
    spec.check()?;
    let first = records.first().ok_or(Error::EmptyInput)?;
    let activities: BTreeSet<&str> = records.iter().map(|r| r.activity_id.as_str()).collect();
    if activities.len() > 1 {
        return Err(Error::MixedActivities(
            activities.into_iter().collect::<Vec<_>>().join(", "),
        ));
    }
    let _ = first;
    let subjects: BTreeSet<&str> = records.iter().map(|r| r.subject_id.as_str()).collect();
    let models: Vec<String> = records
        .iter()
        .map(|r| r.model.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut lookup: BTreeMap<(&str, &str), Option<f64>> = BTreeMap::new();
    for r in records {
        lookup
            .entry((r.subject_id.as_str(), r.model.as_str()))
            .or_insert(r.get(metric));
    }
    let groups: Vec<BarGroup> = subjects
        .iter()
        .map(|s| BarGroup {
            label: s.to_string(),
            bars: models
                .iter()
                .filter_map(|m| lookup.get(&(*s, m.as_str())).map(|v| (m.clone(), *v)))
                .collect(),
        })
        .collect();
    let axis = bar_axis(lookup.values().flatten().copied());
    let mut spec = spec.clone();
    if spec.y_label.is_empty() {
        spec.y_label = match metric.unit() {
            Some(unit) => format!("{} ({unit})", metric.label()),
            None => metric.label().to_string(),
        };
    }
    Ok(render_bars(&spec, &groups, &models, palette, axis, &[], "subject"))
}

pub fn plot_metric_bars(
    records: &[MetricsRecord],
    metric: Metric,
    spec: &PlotSpec,
    palette: &Palette,
    path: &Path,
) -> Result<()> {
    write_file(path, &render_metric_bars(records, metric, spec, palette)?)
}

/// Min-max scaled model means, per metric.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSummary {
    /// `(metric, model) → value in [0, 1]`.
    pub scaled: BTreeMap<(Metric, String), f64>,
    /// Metrics on which every model scored the same; plotted at 0.5.
    pub degenerate: Vec<Metric>,
}

/// Scales each metric's per-model means onto `[0, 1]`. Values are not
/// inverted: low is good for error metrics, high for correlation and R².
pub fn normalize_summary(table: &SummaryTable) -> Result<NormalizedSummary> {
    let rows: Vec<_> = table.rows.iter().filter(|r| r.activity.is_none()).collect();
    let models: BTreeSet<&str> = rows.iter().map(|r| r.model.as_str()).collect();
    if models.len() < 2 {
        return Err(Error::Plot(
            "normalized summary needs an overall table with at least two models".into(),
        ));
    }
    let mut scaled = BTreeMap::new();
    let mut degenerate = Vec::new();
    for metric in Metric::ALL {
        let means: Vec<(&str, f64)> = rows
            .iter()
            .filter_map(|r| r.cell(metric).map(|c| (r.model.as_str(), c.mean)))
            .collect();
        if means.is_empty() {
            continue;
        }
        let lo = means.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
        let hi = means.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max);
        if hi == lo {
            degenerate.push(metric);
        }
        for (model, v) in means {
            let s = if hi == lo { 0.5 } else { (v - lo) / (hi - lo) };
            scaled.insert((metric, model.to_string()), s);
        }
    }
    Ok(NormalizedSummary { scaled, degenerate })
}

pub fn render_normalized_summary(
    table: &SummaryTable,
    spec: &PlotSpec,
    palette: &Palette,
) -> Result<(String, NormalizedSummary)> {
    spec.check()?;
    let norm = normalize_summary(table)?;
    let models: Vec<String> = table.models().into_iter().map(str::to_string).collect();
    let groups: Vec<BarGroup> = Metric::ALL
        .iter()
        .map(|&metric| BarGroup {
            label: metric.label().to_string(),
            bars: models
                .iter()
                .map(|m| (m.clone(), norm.scaled.get(&(metric, m.clone())).copied()))
                .collect(),
        })
        .collect();
    let mut notes = vec![
        "lower is better: RMSE, MAE, NRMSE".to_string(),
        "higher is better: Correlation, R²".to_string(),
    ];
    for m in &norm.degenerate {
        notes.push(format!("{}: all models equal (0.5)", m.label()));
    }
    let svg = render_bars(spec, &groups, &models, palette, (0.0, 1.0), &notes, "metric");
    Ok((svg, norm))
}

pub fn normalized_summary_bars(
    table: &SummaryTable,
    spec: &PlotSpec,
    palette: &Palette,
    path: &Path,
) -> Result<NormalizedSummary> {
    let (svg, norm) = render_normalized_summary(table, spec, palette)?;
    write_file(path, &svg)?;
    Ok(norm)
}
