//! Benchmarking of video-based 3D pose estimates against IMU-derived joint
//! angles.
//!
//! Poses from any model are harmonized onto a canonical 17-joint skeleton,
//! reduced to joint angles, filtered, aligned to the IMU reference by an
//! integer lag search, and scored with RMSE, NRMSE, MAE, Pearson correlation
//! and R².

pub mod align;
pub mod dsp;
pub mod error;
pub mod ingest;
pub mod kinematics;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod skeleton;
pub mod testkit;

pub use align::{AlignmentConfig, AlignmentResult};
pub use dsp::FilterConfig;
pub use error::{Error, Result};
pub use ingest::{TrialManifest, TrialSpec};
pub use kinematics::{AngleCatalog, AngleDefinition, AngleSeries, Provenance};
pub use metrics::{Grouping, Metric, MetricsRecord, StdFlavor, SummaryTable};
pub use skeleton::{HarmonizationMap, JointSet, PoseSequence};
