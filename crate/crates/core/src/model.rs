//! Trajectory domain types, speed-signal extraction, and validation.
//!
//! A [`Trajectory`] is one demonstration: one or more parallel [`ArmTrack`]s
//! sampled at a fixed interval `dt`. All downstream metrics consume these
//! types; multi-arm scores are averaged by the metric layers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{UnitQuat, Vec3, UNIT_NORM_TOL};

/// End-effector states for a single arm of one demonstration.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmTrack {
    /// Positions in meters.
    pub positions: Vec<Vec3>,
    /// Unit quaternions in `(w, x, y, z)` order.
    pub orientations: Vec<UnitQuat>,
    /// Contact signal; `true` means the gripper is closed / in contact.
    pub gripper: Vec<bool>,
    /// Optional recorded velocities in m/s; same length as `positions`.
    pub velocities: Option<Vec<Vec3>>,
}

impl ArmTrack {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// A timestamped demonstration with one or more arms sampled at `dt` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: String,
    pub dt: f64,
    pub arms: Vec<ArmTrack>,
    pub metadata: BTreeMap<String, String>,
}

impl Trajectory {
    /// Number of frames, taken from the first arm (all arms must agree).
    pub fn len(&self) -> usize {
        self.arms.first().map_or(0, ArmTrack::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> ValidationReport {
        validate_trajectory(self)
    }
}

/// Where the scalar speed series comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpeedSource {
    /// Use recorded velocities when present, otherwise forward differences.
    #[default]
    Recorded,
    /// Always forward-difference the positions.
    Differenced,
}

/// A non-negative scalar speed series with a fixed sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedSignal {
    values: Vec<f64>,
    dt: f64,
}

impl SpeedSignal {
    pub fn new(values: Vec<f64>, dt: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SignalTooShort {
                len: values.len(),
                min: 2,
            });
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::DomainError(format!("dt must be positive, got {dt}")));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "speed values must be finite and non-negative, got {bad}"
            )));
        }
        Ok(SpeedSignal { values, dt })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Extracts the scalar speed series of one arm.
///
/// Recorded velocities take precedence (length `T`); otherwise positions are
/// forward-differenced (length `T - 1`).
pub fn derive_speed_signal(arm: &ArmTrack, dt: f64) -> Result<SpeedSignal> {
    speed_signal_from(arm, dt, SpeedSource::Recorded)
}

/// Same as [`derive_speed_signal`] but with an explicit source policy.
pub fn speed_signal_from(arm: &ArmTrack, dt: f64, source: SpeedSource) -> Result<SpeedSignal> {
    if arm.len() < 2 {
        return Err(Error::SignalTooShort {
            len: arm.len(),
            min: 2,
        });
    }
    if arm.positions.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidTrajectory(
            "non-finite position sample".into(),
        ));
    }
    let values = match (&arm.velocities, source) {
        (Some(vel), SpeedSource::Recorded) => {
            if vel.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidTrajectory(
                    "non-finite velocity sample".into(),
                ));
            }
            vel.iter().map(|v| v.norm()).collect()
        }
        _ => arm
            .positions
            .windows(2)
            .map(|w| (w[1] - w[0]).norm() / dt)
            .collect(),
    };
    SpeedSignal::new(values, dt)
}

/// One invariant violation found by [`validate_trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    NonPositiveDt(f64),
    NoArms,
    TooShort { len: usize },
    ArmLengthMismatch {
        arm: usize,
        field: &'static str,
        len: usize,
        expected: usize,
    },
    NonFinitePosition { arm: usize, index: usize },
    NonFiniteVelocity { arm: usize, index: usize },
    NonUnitQuaternion { arm: usize, index: usize, norm: f64 },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::NonPositiveDt(dt) => write!(f, "non-positive dt {dt}"),
            ValidationIssue::NoArms => write!(f, "trajectory has no arms"),
            ValidationIssue::TooShort { len } => {
                write!(f, "trajectory too short: {len} frames, need at least 2")
            }
            ValidationIssue::ArmLengthMismatch {
                arm,
                field,
                len,
                expected,
            } => write!(
                f,
                "arm {arm}: {field} length {len} does not match {expected}"
            ),
            ValidationIssue::NonFinitePosition { arm, index } => {
                write!(f, "arm {arm}: non-finite position at frame {index}")
            }
            ValidationIssue::NonFiniteVelocity { arm, index } => {
                write!(f, "arm {arm}: non-finite velocity at frame {index}")
            }
            ValidationIssue::NonUnitQuaternion { arm, index, norm } => {
                write!(f, "arm {arm}: non-unit quaternion at frame {index} (norm {norm})")
            }
        }
    }
}

/// Result of checking every [`Trajectory`] invariant; valid iff empty.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "ok");
        }
        let mut first = true;
        for issue in &self.issues {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{issue}")?;
            first = false;
        }
        Ok(())
    }
}

/// Reports every invariant violation in `traj`; never fails itself.
pub fn validate_trajectory(traj: &Trajectory) -> ValidationReport {
    let mut issues = Vec::new();
    if !(traj.dt > 0.0) || !traj.dt.is_finite() {
        issues.push(ValidationIssue::NonPositiveDt(traj.dt));
    }
    if traj.arms.is_empty() {
        issues.push(ValidationIssue::NoArms);
        return ValidationReport { issues };
    }
    let expected = traj.arms[0].len();
    if expected < 2 {
        issues.push(ValidationIssue::TooShort { len: expected });
    }
    for (a, arm) in traj.arms.iter().enumerate() {
        if arm.len() != expected {
            issues.push(ValidationIssue::ArmLengthMismatch {
                arm: a,
                field: "positions",
                len: arm.len(),
                expected,
            });
        }
        if arm.orientations.len() != arm.len() {
            issues.push(ValidationIssue::ArmLengthMismatch {
                arm: a,
                field: "orientations",
                len: arm.orientations.len(),
                expected: arm.len(),
            });
        }
        if arm.gripper.len() != arm.len() {
            issues.push(ValidationIssue::ArmLengthMismatch {
                arm: a,
                field: "gripper",
                len: arm.gripper.len(),
                expected: arm.len(),
            });
        }
        if let Some(vel) = &arm.velocities {
            if vel.len() != arm.len() {
                issues.push(ValidationIssue::ArmLengthMismatch {
                    arm: a,
                    field: "velocities",
                    len: vel.len(),
                    expected: arm.len(),
                });
            }
            for (i, v) in vel.iter().enumerate() {
                if !v.is_finite() {
                    issues.push(ValidationIssue::NonFiniteVelocity { arm: a, index: i });
                }
            }
        }
        for (i, p) in arm.positions.iter().enumerate() {
            if !p.is_finite() {
                issues.push(ValidationIssue::NonFinitePosition { arm: a, index: i });
            }
        }
        for (i, q) in arm.orientations.iter().enumerate() {
            let norm = q.norm();
            if !q.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
                issues.push(ValidationIssue::NonUnitQuaternion {
                    arm: a,
                    index: i,
                    norm,
                });
            }
        }
    }
    ValidationReport { issues }
}

/// Errors with [`Error::InvalidTrajectory`] unless `traj` passes validation.
pub(crate) fn require_valid(traj: &Trajectory) -> Result<()> {
    let report = validate_trajectory(traj);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidTrajectory(report.to_string()))
    }
}
