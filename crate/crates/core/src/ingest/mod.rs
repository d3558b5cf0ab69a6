//! Readers and writers for pose CSV, OpenSim `.mot` files and run manifests.

pub mod convert;
pub mod manifest;
pub mod mot;
pub mod pose_csv;

pub use convert::{convert_model_output, load_model_pose, ModelKind};
pub use manifest::{
    load_manifest, parse_manifest, OverallAggregation, TrialManifest, TrialSpec,
    DEFAULT_IMU_RATE_HZ, DEFAULT_VIDEO_RATE_HZ,
};
pub use mot::{extract_imu_angle, parse_mot, read_mot, MotTable};
pub use pose_csv::{parse_pose_csv, pose_csv_string, read_pose_csv, write_pose_csv};
