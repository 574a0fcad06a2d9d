//! Smoothness scoring and curation for robot demonstration trajectories.
//!
//! Two complementary reference-free metrics drive everything:
//!
//! - **SAL** (spectral arc length): the negative arc length of the one-sided
//!   log-magnitude spectrum of the end-effector speed signal. Closer to zero
//!   means smoother.
//! - **TED** (trajectory-envelope distance): the normalized alignment
//!   distance between a trajectory and its contact-aware Bézier-smoothed
//!   reference. Lower means smoother.
//!
//! On top of the metrics sit curation utilities (ranking, top-k filtering,
//! badness normalization, soft weighting, retrieval re-ranking), diagnostic
//! estimators for the conditional action variance of a dataset and its
//! downstream amplification, a synthetic trajectory generator with known
//! ground-truth quality for validation, and batch file I/O.

pub mod alignment;
pub mod curation;
pub mod diagnostics;
pub mod envelope;
pub mod error;
pub mod geometry;
pub mod io;
mod knn;
pub mod model;
pub mod oracles;
pub mod pipeline;
pub mod report;
pub mod spectral;
mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{RotationVector, UnitQuat, Vec3};
pub use model::{
    derive_speed_signal, validate_trajectory, ArmTrack, SpeedSignal, SpeedSource, Trajectory,
};
pub use spectral::{sal, sal_for_trajectory, SalConfig};
pub use alignment::ted;
pub use envelope::TedConfig;
pub use curation::{Metric, Normalization, ScoreRecord, WeightConfig};
pub use pipeline::PipelineConfig;
