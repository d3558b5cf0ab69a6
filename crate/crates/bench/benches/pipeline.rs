use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use kinebench::align::{best_offset, AlignmentConfig};
use kinebench::dsp::{condition_imu, condition_video, FilterConfig};
use kinebench::ingest::load_manifest;
use kinebench::kinematics::{joint_angle, AngleCatalog};
use kinebench::metrics::{aggregate, Grouping, MetricsRecord, StdFlavor};
use kinebench::pipeline::{process_trial, PipelineConfig};
use kinebench::testkit::{benchmark_bundle, corrupt_series, emit_fixture, synth_pose, CorruptionSpec, SynthSpec};

fn stages(c: &mut Criterion) {
    let spec = SynthSpec {
        duration_s: 60.0,
        ..SynthSpec::default()
    };
    let (pose, analytic) = synth_pose(&spec).unwrap();
    let catalog = AngleCatalog::default();
    let def = catalog.definition("knee_angle_l").unwrap();
    let filter = FilterConfig::default();

    c.bench_function("joint_angle 1800 frames", |b| {
        b.iter(|| joint_angle(black_box(&pose), def).unwrap())
    });
    c.bench_function("condition_video 1800 samples", |b| {
        b.iter(|| condition_video(black_box(&analytic), &filter).unwrap())
    });
    let imu = spec.analytic_series(50.0).unwrap();
    c.bench_function("condition_imu 3000 samples", |b| {
        b.iter(|| condition_imu(black_box(&imu), &filter).unwrap())
    });

    let lagged = corrupt_series(
        &analytic,
        &CorruptionSpec {
            noise_std_deg: 0.5,
            lag_samples: 7,
            seed: 1,
            ..Default::default()
        },
    )
    .unwrap();
    let cfg = AlignmentConfig::default();
    c.bench_function("best_offset +-15", |b| {
        b.iter(|| best_offset(black_box(&analytic), black_box(&lagged), &cfg).unwrap())
    });
}

fn trial(c: &mut Criterion) {
    let dir = std::env::temp_dir().join(format!("kinebench-bench-{}", std::process::id()));
    let manifest = load_manifest(&emit_fixture(&benchmark_bundle(), &dir).unwrap()).unwrap();
    let cfg = PipelineConfig {
        filter: manifest.filter_config,
        alignment: manifest.alignment_config,
        catalog: manifest.catalog().unwrap(),
    };
    c.bench_function("process_trial 20 s fixture", |b| {
        b.iter(|| process_trial(black_box(&manifest.trials[3]), &cfg).unwrap())
    });
    let _ = std::fs::remove_dir_all(&dir);
}

fn aggregation(c: &mut Criterion) {
    let records: Vec<MetricsRecord> = (0..16 * 13 * 4)
        .map(|i| MetricsRecord {
            subject_id: format!("S{:02}", i % 16),
            activity_id: format!("A{:02}", 1 + (i / 16) % 13),
            model: format!("model{}", i % 4),
            rmse: Some(i as f64 % 17.0),
            nrmse: Some(0.1),
            mae: Some(i as f64 % 11.0),
            pearson: Some(0.9),
            r2: Some(0.5),
            n_samples: 300,
            offset: Some(0),
            fit_rmse: Some(1.0),
        })
        .collect();
    c.bench_function("aggregate 832 records per activity", |b| {
        b.iter(|| aggregate(black_box(&records), Grouping::PerActivityPerModel, StdFlavor::Population).unwrap())
    });
}

criterion_group!(benches, stages, trial, aggregation);
criterion_main!(benches);
