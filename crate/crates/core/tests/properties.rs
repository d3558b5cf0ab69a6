use nalgebra::{Rotation3, Unit, Vector3};
use proptest::prelude::*;

use kinebench::align::{apply_offset_and_trim, best_offset, AlignmentConfig};
use kinebench::dsp::{interpolate_gaps, mean_remove, median_filter, moving_average, resample};
use kinebench::ingest::{extract_imu_angle, parse_mot, parse_pose_csv, pose_csv_string};
use kinebench::kinematics::{joint_angle, AngleCatalog, AngleSeries, Provenance};
use kinebench::metrics::{mae, nrmse, pearson, r2, rmse};
use kinebench::skeleton::{canonical_joint_set, harmonize, HarmonizationMap, PoseSequence};
use kinebench::testkit::{corrupt_series, mot_text, synth_pose, CorruptionSpec, Motion, SynthSpec};

fn series(values: Vec<f64>, rate: f64) -> AngleSeries {
    AngleSeries::from_values("x", Provenance::Synthetic, rate, values).unwrap()
}

fn signal_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..300).prop_flat_map(|n| {
        (
            prop::collection::vec(-180.0f64..180.0, n),
            prop::collection::vec(-180.0f64..180.0, n),
        )
    })
}

fn motion() -> impl Strategy<Value = Motion> {
    prop::sample::select(Motion::ALL.to_vec())
}

fn synth_spec() -> impl Strategy<Value = SynthSpec> {
    (motion(), 0.0f64..=90.0, 0.05f64..3.0, 0.5f64..5.0, 10.0f64..120.0, any::<u64>()).prop_map(
        |(motion, amplitude_deg, frequency_hz, duration_s, rate_hz, seed)| SynthSpec {
            motion,
            amplitude_deg,
            frequency_hz,
            duration_s,
            rate_hz,
            seed,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metric_identities((y, yhat) in signal_pair()) {
        let e = rmse(&y, &yhat).unwrap();
        prop_assert!(mae(&y, &yhat).unwrap() <= e * (1.0 + 1e-12));
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            let n = nrmse(&y, &yhat).unwrap();
            prop_assert!((n * (hi - lo) - e).abs() <= 1e-12 * e.max(1.0));
            prop_assert!(r2(&y, &yhat).unwrap() <= 1.0);
        }
        if let Ok(p) = pearson(&y, &yhat) {
            prop_assert!((-1.0..=1.0).contains(&p));
        }
        prop_assert_eq!(rmse(&y, &y).unwrap(), 0.0);
    }

    #[test]
    fn moving_average_stays_within_range(values in prop::collection::vec(-1e3f64..1e3, 5..200), half in 0usize..4) {
        let s = series(values.clone(), 30.0);
        let w = 2 * half + 1;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for out in [moving_average(&s, w).unwrap(), median_filter(&s, w).unwrap()] {
            prop_assert_eq!(out.len(), values.len());
            for v in out.values() {
                prop_assert!(*v >= lo - 1e-9 && *v <= hi + 1e-9);
            }
        }
    }

    #[test]
    fn filters_preserve_constants(c in -1e3f64..1e3, n in 5usize..100) {
        let s = series(vec![c; n], 30.0);
        prop_assert!(moving_average(&s, 5).unwrap().values().iter().all(|&v| v == c));
        prop_assert!(moving_average(&s, 4).unwrap().values().iter().all(|&v| v == c));
        prop_assert!(median_filter(&s, 5).unwrap().values().iter().all(|&v| v == c));
    }

    #[test]
    fn mean_removal_centres(values in prop::collection::vec(-1e3f64..1e3, 1..500)) {
        let out = mean_remove(&series(values, 30.0)).unwrap();
        let mean = out.values().iter().sum::<f64>() / out.len() as f64;
        prop_assert!(mean.abs() < 1e-9);
    }

    #[test]
    fn resample_is_exact_on_affine(a in -100.0f64..100.0, b in -50.0f64..50.0, n in 2usize..400,
                                   src in prop::sample::select(vec![25.0, 30.0, 50.0, 60.0, 100.0]),
                                   dst in prop::sample::select(vec![10.0, 25.0, 30.0, 50.0, 120.0])) {
        let s = series((0..n).map(|i| a + b * i as f64 / src).collect(), src);
        let out = resample(&s, dst).unwrap();
        prop_assert_eq!(out.sample_rate_hz(), dst);
        prop_assert!(!out.is_empty());
        for (k, v) in out.values().iter().enumerate() {
            let t = k as f64 / dst;
            prop_assert!(t <= (n - 1) as f64 / src + 1e-9);
            prop_assert!((v - (a + b * t)).abs() < 1e-9);
        }
    }

    #[test]
    fn interpolation_keeps_valid_samples(values in prop::collection::vec(-90.0f64..90.0, 1..200),
                                         drop in prop::collection::vec(any::<bool>(), 200)) {
        let n = values.len();
        let mut mask: Vec<bool> = drop[..n].to_vec();
        mask[n / 2] = true;
        let s = AngleSeries::new("x", Provenance::Imu, 50.0, values.clone(), mask.clone()).unwrap();
        let out = interpolate_gaps(&s).unwrap();
        prop_assert!(out.is_fully_valid());
        for i in 0..n {
            if mask[i] {
                prop_assert_eq!(out.values()[i], values[i]);
            }
        }
    }

    #[test]
    fn lag_recovered_on_sinusoids(lag in -15i64..=15, freq in 0.2f64..1.0, phase in 0.0f64..std::f64::consts::TAU) {
        let truth = series((0..600).map(|i| 30.0 * (2.0 * std::f64::consts::PI * freq * i as f64 / 30.0 + phase).sin()).collect(), 30.0);
        let lagged = corrupt_series(&truth, &CorruptionSpec { lag_samples: lag, ..Default::default() }).unwrap();
        let r = best_offset(&truth, &lagged, &AlignmentConfig::default()).unwrap();
        prop_assert_eq!(r.offset, lag);
        let (a, b) = apply_offset_and_trim(&truth, &lagged, r.offset).unwrap();
        prop_assert_eq!(a.len(), 600 - lag.unsigned_abs() as usize);
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn synthetic_angles_survive_similarity_transforms(spec in synth_spec(),
                                                      axis in (-1.0f64..1.0, -1.0f64..1.0, 0.1f64..1.0),
                                                      angle in -std::f64::consts::PI..std::f64::consts::PI,
                                                      shift in (-100.0f64..100.0, -100.0f64..100.0, -100.0f64..100.0),
                                                      scale in 0.01f64..100.0) {
        let (pose, analytic) = synth_pose(&spec).unwrap();
        let def = AngleCatalog::default().definition(spec.motion.angle_name()).unwrap().clone();
        let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(axis.0, axis.1, axis.2)), angle);
        let t = Vector3::new(shift.0, shift.1, shift.2);
        let moved = pose.map_points(|p| {
            let q = rot * Vector3::new(p[0], p[1], p[2]) * scale + t;
            [q.x, q.y, q.z]
        });
        let a = joint_angle(&pose, &def).unwrap();
        let b = joint_angle(&moved, &def).unwrap();
        for ((x, y), z) in a.values().iter().zip(b.values()).zip(analytic.values()) {
            prop_assert!((x - z).abs() < 1e-9);
            prop_assert!((y - z).abs() < 1e-9, "{} vs {}", y, z);
        }
    }

    #[test]
    fn pose_csv_round_trip(frames in 1usize..20, seed in any::<u64>(), holes in prop::collection::vec(any::<bool>(), 17 * 20)) {
        let (pose, _) = synth_pose(&SynthSpec { duration_s: frames as f64 / 30.0, seed, ..SynthSpec::default() }).unwrap();
        let n = pose.points().len();
        let valid: Vec<bool> = holes[..n].iter().map(|h| !h).collect();
        let points = pose.points().iter().zip(&valid).map(|(p, ok)| if *ok { *p } else { [f64::NAN; 3] }).collect();
        let pose = PoseSequence::new(canonical_joint_set(), points, valid.clone(), 30.0).unwrap();
        let back = parse_pose_csv(pose_csv_string(&pose).as_bytes(), None, 30.0).unwrap();
        prop_assert_eq!(back.mask(), &valid[..]);
        for (i, (a, b)) in pose.points().iter().zip(back.points()).enumerate() {
            if valid[i] {
                prop_assert_eq!(a, b);
            }
        }
        let same = harmonize(&back, &HarmonizationMap::identity(back.joint_set()), &[]).unwrap();
        prop_assert_eq!(pose_csv_string(&same), pose_csv_string(&back));
    }

    #[test]
    fn mot_round_trip(values in prop::collection::vec(-1e4f64..1e4, 1..300), rate in 1.0f64..500.0) {
        let s = series(values.clone(), rate);
        let table = parse_mot(&mot_text("t", "knee_angle_l", &s)).unwrap();
        let back = extract_imu_angle(&table, "knee_angle_l", rate).unwrap();
        prop_assert_eq!(back.values(), &values[..]);
        prop_assert!(back.is_fully_valid());
    }

    #[test]
    fn corruption_is_a_pure_function(seed in any::<u64>(), noise in 0.0f64..2.0, dropout in 0.0f64..0.9, lag in -15i64..=15) {
        let truth = SynthSpec::default().analytic_series(30.0).unwrap();
        let spec = CorruptionSpec { noise_std_deg: noise, dropout_prob: dropout, lag_samples: lag, seed };
        let a = corrupt_series(&truth, &spec).unwrap();
        let b = corrupt_series(&truth, &spec).unwrap();
        prop_assert_eq!(a.mask(), b.mask());
        prop_assert_eq!(a.len(), truth.len());
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!(x.to_bits() == y.to_bits());
        }
    }
}
