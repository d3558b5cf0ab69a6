//! Subcommands of the `kinebench` binary, usable as a library.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use kinebench::dsp::FilterConfig;
use kinebench::align::AlignmentConfig;
use kinebench::ingest::{
    convert_model_output, load_manifest, read_pose_csv, OverallAggregation, TrialSpec,
};
use kinebench::kinematics::{joint_angle, AngleCatalog};
use kinebench::metrics::{read_records_csv, write_records_csv, MetricsRecord, StdFlavor};
use kinebench::pipeline::{overlay_window, process_trial, PipelineConfig, TrialOutcome};
use kinebench::report::{
    overlay_file_name, plot_overlay, write_aggregate_outputs, Palette, PlotKind, PlotSpec,
    ReportOptions,
};
use kinebench::testkit::{
    benchmark_bundle, emit_fixture, CorruptionSpec, FixtureBundle, FixtureTrial, Motion, SynthSpec,
};

pub const RECORDS_FILE: &str = "results.csv";
pub const RUN_LOG_FILE: &str = "run_log.json";

const OUTPUT_FILES_HELP: &str = "\
Output files:
  results.csv                               one row per successful trial
  run_log.json                              per-trial status, timings, configuration
  summary_per_activity_per_model.{csv,md}   per-activity tables
  summary_overall_per_model.{csv,md}        overall table (or summary_overall_of_activity_means)
  <activity>_<metric>.svg                   per-subject bars for each metric
  summary_normalized.svg                    min-max normalized model comparison
  overlay_<subject>_<activity>.svg          aligned signals (run only)";

#[derive(Debug, Parser)]
#[command(name = "kinebench", version, about = "Benchmark video pose estimates against IMU joint angles")]
pub struct Cli {
    /// Trials processed in parallel; output order never depends on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Overrides the output directory of `run`, `report` and `synth`.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// More log output; repeat for debug detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a model-native pose CSV to the canonical 17-joint layout.
    Convert(ConvertArgs),
    /// Write the unfiltered joint angle of one activity as `time_s,angle_deg`.
    Angles(AnglesArgs),
    /// Process every trial of a manifest and emit records, tables and figures.
    #[command(after_help = OUTPUT_FILES_HELP)]
    Run(RunArgs),
    /// Regenerate tables and figures from a results CSV.
    #[command(after_help = OUTPUT_FILES_HELP)]
    Report(ReportArgs),
    /// Write a synthetic fixture: pose CSVs, `.mot` references and a manifest.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Model kind: h36m17_generic, bodytrack34, or any name with --map.
    #[arg(long)]
    pub kind: String,
    /// Harmonization map file (`source -> target` lines).
    #[arg(long)]
    pub map: Option<PathBuf>,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnglesArgs {
    /// Canonical pose CSV.
    pub pose: PathBuf,
    /// Activity ID such as A01.
    pub activity: String,
    pub output: PathBuf,
    #[arg(long, default_value_t = 30.0)]
    pub rate: f64,
    /// Angle and activity overrides (`name: m1,m2,m3,m4`, `A01: name`).
    #[arg(long)]
    pub angle_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StdArg {
    Population,
    Sample,
}

impl From<StdArg> for StdFlavor {
    fn from(v: StdArg) -> Self {
        match v {
            StdArg::Population => StdFlavor::Population,
            StdArg::Sample => StdFlavor::Sample,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OverallArg {
    Trials,
    ActivityMeans,
}

impl From<OverallArg> for OverallAggregation {
    fn from(v: OverallArg) -> Self {
        match v {
            OverallArg::Trials => OverallAggregation::Trials,
            OverallArg::ActivityMeans => OverallAggregation::ActivityMeans,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Records CSV written by `run`.
    pub records: PathBuf,
    #[arg(long, value_enum, default_value_t = StdArg::Population)]
    pub std: StdArg,
    #[arg(long, value_enum, default_value_t = OverallArg::Trials)]
    pub overall: OverallArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MotionArg {
    SinusoidKnee,
    SinusoidElbow,
    ConstantPose,
}

impl From<MotionArg> for Motion {
    fn from(v: MotionArg) -> Self {
        match v {
            MotionArg::SinusoidKnee => Motion::SinusoidKnee,
            MotionArg::SinusoidElbow => Motion::SinusoidElbow,
            MotionArg::ConstantPose => Motion::ConstantPose,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Fixture directory; --output-dir takes precedence.
    pub dir: Option<PathBuf>,
    /// Emit the four-trial benchmark (clean, noisy, lagged, noisy+lagged)
    /// and ignore the single-trial flags.
    #[arg(long)]
    pub benchmark: bool,
    #[arg(long, value_enum, default_value_t = MotionArg::SinusoidKnee)]
    pub motion: MotionArg,
    #[arg(long, default_value_t = 30.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.5)]
    pub frequency: f64,
    #[arg(long, default_value_t = 20.0)]
    pub duration: f64,
    /// Video frame rate.
    #[arg(long, default_value_t = 30.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 50.0)]
    pub imu_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Gaussian noise on the video angle, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.0)]
    pub dropout: f64,
    /// Video delay in frames, at most 15 either way.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub lag: i64,
    #[arg(long, default_value_t = 0)]
    pub corruption_seed: u64,
    #[arg(long, default_value = "S01")]
    pub subject: String,
    #[arg(long, default_value = "A01")]
    pub activity: String,
    #[arg(long, default_value = "synthetic")]
    pub model: String,
}

impl SynthArgs {
    pub fn bundle(&self) -> FixtureBundle {
        if self.benchmark {
            return benchmark_bundle();
        }
        FixtureBundle {
            trials: vec![FixtureTrial {
                subject_id: self.subject.clone(),
                activity_id: self.activity.clone(),
                model_name: self.model.clone(),
                motion: SynthSpec {
                    motion: self.motion.into(),
                    amplitude_deg: self.amplitude,
                    frequency_hz: self.frequency,
                    duration_s: self.duration,
                    rate_hz: self.rate,
                    seed: self.seed,
                },
                corruption: CorruptionSpec {
                    noise_std_deg: self.noise,
                    dropout_prob: self.dropout,
                    lag_samples: self.lag,
                    seed: self.corruption_seed,
                },
            }],
            imu_rate_hz: self.imu_rate,
        }
    }
}

/// Outcome of one manifest trial in the run log.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialStatus {
    Ok { offset: i64, n_samples: usize },
    Skipped { reason: String },
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialLog {
    pub index: usize,
    pub subject_id: String,
    pub activity_id: String,
    pub model: String,
    #[serde(flatten)]
    pub status: TrialStatus,
    pub elapsed_ms: f64,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigSnapshot {
    pub manifest_path: PathBuf,
    pub output_dir: PathBuf,
    pub jobs: u64,
    pub filter_config: FilterConfig,
    pub alignment_config: AlignmentConfig,
    pub std_flavor: StdFlavor,
    pub overall_aggregation: OverallAggregation,
    pub angle_config_path: Option<PathBuf>,
    pub trials: Vec<TrialSpec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunLog {
    pub tool: String,
    pub version: String,
    pub config: ConfigSnapshot,
    pub trials: Vec<TrialLog>,
    pub n_ok: usize,
    pub n_skipped: usize,
    pub n_failed: usize,
    pub elapsed_ms: f64,
}

/// Result of `run`: records of successful trials in manifest order plus the
/// log and the files written.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub records: Vec<MetricsRecord>,
    pub log: RunLog,
    pub output_dir: PathBuf,
    pub written: Vec<PathBuf>,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn cmd_convert(args: &ConvertArgs) -> Result<()> {
    let required = AngleCatalog::default().required_joints();
    let seq = convert_model_output(&args.input, &args.kind, args.map.as_deref(), &required, &args.output)
        .with_context(|| format!("converting {}", args.input.display()))?;
    info!(
        "wrote {} frames x {} joints to {}",
        seq.n_frames(),
        seq.n_joints(),
        args.output.display()
    );
    Ok(())
}

/// `time_s,angle_deg` with invalid samples left empty.
pub fn angles_csv(series: &kinebench::AngleSeries) -> String {
    let mut out = String::from("time_s,angle_deg\n");
    let rate = series.sample_rate_hz();
    for (i, (v, ok)) in series.values().iter().zip(series.mask()).enumerate() {
        let t = i as f64 / rate;
        if *ok {
            let _ = writeln!(out, "{t},{v}");
        } else {
            let _ = writeln!(out, "{t},");
        }
    }
    out
}

pub fn cmd_angles(args: &AnglesArgs) -> Result<()> {
    let catalog = match &args.angle_config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            AngleCatalog::with_overrides(&text)?
        }
        None => AngleCatalog::default(),
    };
    let def = catalog.for_activity(&args.activity)?;
    let pose = read_pose_csv(&args.pose, None, args.rate)?;
    let series = joint_angle(&pose, def)?;
    std::fs::write(&args.output, angles_csv(&series))
        .with_context(|| format!("writing {}", args.output.display()))?;
    info!("wrote {} samples of {} to {}", series.len(), def.name(), args.output.display());
    Ok(())
}

fn thread_pool(jobs: u64) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build()
        .context("starting worker threads")
}

fn write_overlays(outcomes: &[&TrialOutcome], palette: &Palette, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut groups: BTreeMap<(&str, &str), Vec<&TrialOutcome>> = BTreeMap::new();
    for o in outcomes {
        groups
            .entry((o.record.subject_id.as_str(), o.record.activity_id.as_str()))
            .or_default()
            .push(o);
    }
    let mut written = Vec::new();
    for ((subject, activity), group) in groups {
        let Some((reference, estimates)) = overlay_window(&group) else {
            warn!("{subject} {activity}: aligned windows do not overlap, no overlay");
            continue;
        };
        let spec = PlotSpec::new(
            PlotKind::Overlay,
            format!("{subject} {activity}: {}", reference.label()),
        );
        let path = dir.join(overlay_file_name(subject, activity));
        plot_overlay(&reference, &estimates, &spec, palette, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Runs every manifest trial. Fails only when the manifest is empty or no
/// trial succeeds; the run log is written in either case once trials ran.
pub fn cmd_run(manifest_path: &Path, output_dir: Option<&Path>, jobs: u64) -> Result<RunSummary> {
    let started = Instant::now();
    let manifest = load_manifest(manifest_path)
        .with_context(|| format!("loading manifest {}", manifest_path.display()))?;
    if manifest.trials.is_empty() {
        bail!("manifest {} lists no trials", manifest_path.display());
    }
    let out_dir = output_dir.map_or_else(|| manifest.output_dir.clone(), Path::to_path_buf);
    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let palette = Palette::from_env()?;
    let cfg = PipelineConfig {
        filter: manifest.filter_config,
        alignment: manifest.alignment_config,
        catalog: manifest.catalog()?,
    };

    // a repeated (subject, activity, model) would collide in every table
    let mut first_seen: BTreeMap<(&str, &str, &str), usize> = BTreeMap::new();
    let duplicate_of: Vec<Option<usize>> = manifest
        .trials
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let key = (t.subject_id.as_str(), t.activity_id.as_str(), t.model_name.as_str());
            match first_seen.get(&key) {
                Some(&j) => Some(j),
                None => {
                    first_seen.insert(key, i);
                    None
                }
            }
        })
        .collect();

    let pool = thread_pool(jobs)?;
    let results: Vec<(Option<kinebench::Result<TrialOutcome>>, f64)> = pool.install(|| {
        manifest
            .trials
            .par_iter()
            .zip(&duplicate_of)
            .map(|(trial, dup)| {
                let t0 = Instant::now();
                let outcome = dup.is_none().then(|| process_trial(trial, &cfg));
                (outcome, ms(t0))
            })
            .collect()
    });

    let mut logs = Vec::with_capacity(results.len());
    let mut outcomes = Vec::new();
    for (index, ((result, elapsed_ms), trial)) in results.into_iter().zip(&manifest.trials).enumerate() {
        let status = match result {
            None => TrialStatus::Skipped {
                reason: format!(
                    "duplicate of trial {}",
                    duplicate_of[index].expect("skipped trials are duplicates")
                ),
            },
            Some(Ok(outcome)) => {
                let status = TrialStatus::Ok {
                    offset: outcome.alignment.offset,
                    n_samples: outcome.record.n_samples,
                };
                outcomes.push(outcome);
                status
            }
            Some(Err(e)) => {
                warn!(
                    "trial {index} ({} {} {}) failed: {e}",
                    trial.subject_id, trial.activity_id, trial.model_name
                );
                TrialStatus::Failed { error: e.to_string() }
            }
        };
        logs.push(TrialLog {
            index,
            subject_id: trial.subject_id.clone(),
            activity_id: trial.activity_id.clone(),
            model: trial.model_name.clone(),
            status,
            elapsed_ms,
        });
    }
    let count = |f: fn(&TrialStatus) -> bool| logs.iter().filter(|l| f(&l.status)).count();
    let n_ok = count(|s| matches!(s, TrialStatus::Ok { .. }));
    let n_skipped = count(|s| matches!(s, TrialStatus::Skipped { .. }));
    let n_failed = count(|s| matches!(s, TrialStatus::Failed { .. }));

    let mut log = RunLog {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: ConfigSnapshot {
            manifest_path: manifest_path.to_path_buf(),
            output_dir: out_dir.clone(),
            jobs,
            filter_config: manifest.filter_config,
            alignment_config: manifest.alignment_config,
            std_flavor: manifest.std_flavor,
            overall_aggregation: manifest.overall_aggregation,
            angle_config_path: manifest.angle_config_path.clone(),
            trials: manifest.trials.clone(),
        },
        trials: logs,
        n_ok,
        n_skipped,
        n_failed,
        elapsed_ms: 0.0,
    };

    let mut written = Vec::new();
    if n_ok > 0 {
        let records: Vec<MetricsRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
        let records_path = out_dir.join(RECORDS_FILE);
        write_records_csv(&records, &records_path)?;
        written.push(records_path);
        let opts = ReportOptions {
            flavor: manifest.std_flavor,
            overall: manifest.overall_aggregation.grouping(),
            palette: palette.clone(),
        };
        written.extend(write_aggregate_outputs(&records, &opts, &out_dir)?);
        let refs: Vec<&TrialOutcome> = outcomes.iter().collect();
        written.extend(write_overlays(&refs, &palette, &out_dir)?);
    }
    log.elapsed_ms = ms(started);
    let log_path = out_dir.join(RUN_LOG_FILE);
    let text = serde_json::to_string_pretty(&log)? + "\n";
    std::fs::write(&log_path, text).with_context(|| format!("writing {}", log_path.display()))?;
    written.push(log_path);

    if n_ok == 0 {
        bail!(
            "no trial succeeded ({n_failed} failed, {n_skipped} skipped); see {}",
            out_dir.join(RUN_LOG_FILE).display()
        );
    }
    info!("{n_ok} of {} trials succeeded", log.trials.len());
    Ok(RunSummary {
        records: outcomes.into_iter().map(|o| o.record).collect(),
        log,
        output_dir: out_dir,
        written,
    })
}

/// Rebuilds every records-derived output. Writes next to the records file
/// unless `output_dir` is given.
pub fn cmd_report(
    records_path: &Path,
    output_dir: Option<&Path>,
    flavor: StdFlavor,
    overall: OverallAggregation,
) -> Result<Vec<PathBuf>> {
    let records = read_records_csv(records_path)
        .with_context(|| format!("reading records {}", records_path.display()))?;
    if records.is_empty() {
        bail!("{} holds no records", records_path.display());
    }
    let dir = match output_dir {
        Some(d) => d.to_path_buf(),
        None => records_path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf(),
    };
    let opts = ReportOptions {
        flavor,
        overall: overall.grouping(),
        palette: Palette::from_env()?,
    };
    Ok(write_aggregate_outputs(&records, &opts, &dir)?)
}

pub fn cmd_synth(args: &SynthArgs, output_dir: Option<&Path>) -> Result<PathBuf> {
    let dir = output_dir
        .map(Path::to_path_buf)
        .or_else(|| args.dir.clone())
        .context("synth needs a directory (positional DIR or --output-dir)")?;
    let manifest = emit_fixture(&args.bundle(), &dir)?;
    info!("wrote fixture manifest {}", manifest.display());
    Ok(manifest)
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let out = cli.output_dir.as_deref();
    match &cli.command {
        Command::Convert(a) => cmd_convert(a),
        Command::Angles(a) => cmd_angles(a),
        Command::Run(a) => cmd_run(&a.manifest, out, cli.jobs).map(|s| {
            println!(
                "{} ok, {} failed, {} skipped; results in {}",
                s.log.n_ok,
                s.log.n_failed,
                s.log.n_skipped,
                s.output_dir.display()
            );
        }),
        Command::Report(a) => cmd_report(&a.records, out, a.std.into(), a.overall.into()).map(|w| {
            println!("wrote {} files", w.len());
        }),
        Command::Synth(a) => cmd_synth(a, out).map(|m| println!("{}", m.display())),
    }
}
