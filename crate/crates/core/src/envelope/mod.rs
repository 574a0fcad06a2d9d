//! Contact-aware smoothed reference construction: phase partition, greedy
//! Bézier envelope per region, and geodesic orientation smoothing.

mod bezier;
mod karcher;
mod partition;

pub use bezier::{
    bezier_eval, corridor_fallback, greedy_envelope, uniform_indices, RegionEnvelope, RegionFit,
};
pub use karcher::{karcher_mean, smooth_orientations};
pub use partition::{partition_phases, Region, RegionKind, RegionPartition};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{UnitQuat, Vec3};
use crate::model::ArmTrack;

/// Hyperparameters for the smoothed-reference construction and the distance
/// score built on top of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TedConfig {
    /// Boundary fraction of each phase marked dense.
    pub r: f64,
    /// Corridor width for dense regions (meters).
    pub eps_dense: f64,
    /// Corridor width for sparse regions (meters).
    pub eps_sparse: f64,
    /// Initial control-point count for dense regions.
    pub k0_dense: usize,
    /// Initial control-point count for sparse regions.
    pub k0_sparse: usize,
    /// Maximum greedy refinement iterations.
    pub m_ref: usize,
    /// Mean-residual budget; `None` means half the region's corridor width.
    pub area_budget: Option<f64>,
    /// Numerical tolerance for penalty termination and degeneracy checks.
    pub eps_num: f64,
    /// Half-width of the orientation smoothing window, in timesteps.
    pub karcher_halfwidth: usize,
    /// Orientation weight in the alignment cost.
    pub w_ori: f64,
    /// Blend of raw samples into dense-region envelopes, in `[0, 1]`.
    pub boundary_blend: f64,
    /// Window radius for the multiscale alignment.
    pub dtw_radius: usize,
}

impl Default for TedConfig {
    fn default() -> Self {
        TedConfig {
            r: 0.2,
            eps_dense: 0.10,
            eps_sparse: 0.05,
            k0_dense: 10,
            k0_sparse: 12,
            m_ref: 20,
            area_budget: None,
            eps_num: 1e-9,
            karcher_halfwidth: 4,
            w_ori: 0.25,
            boundary_blend: 0.0,
            dtw_radius: 1,
        }
    }
}

impl TedConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "r must lie in (0, 0.5), got {}",
                self.r
            )));
        }
        if !(self.eps_dense > 0.0) || !(self.eps_sparse > 0.0) {
            return Err(Error::InvalidConfig("corridor widths must be positive".into()));
        }
        if self.k0_dense < 2 || self.k0_sparse < 2 {
            return Err(Error::InvalidConfig(
                "initial control-point counts must be at least 2".into(),
            ));
        }
        if self.m_ref < 1 {
            return Err(Error::InvalidConfig("m_ref must be at least 1".into()));
        }
        if let Some(b) = self.area_budget {
            if !(b > 0.0) {
                return Err(Error::InvalidConfig("area budget must be positive".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.boundary_blend) {
            return Err(Error::InvalidConfig(
                "boundary blend must lie in [0, 1]".into(),
            ));
        }
        if !(self.w_ori >= 0.0) || !(self.eps_num >= 0.0) {
            return Err(Error::InvalidConfig(
                "w_ori and eps_num must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Per-region fit record attached to an [`EnvelopeResult`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSummary {
    pub start: usize,
    pub end: usize,
    pub kind: RegionKind,
    pub phase: usize,
    pub fit: RegionFit,
}

/// The smoothed reference trajectory for one arm.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub positions: Vec<Vec3>,
    pub orientations: Vec<UnitQuat>,
    pub regions: Vec<RegionSummary>,
}

/// Builds the contact-aware smoothed reference of one arm: partition by
/// contact, fit each region with its kind's corridor and control budget,
/// optionally blend dense regions back toward the raw samples, and smooth
/// orientations within each phase.
pub fn build_reference(arm: &ArmTrack, cfg: &TedConfig) -> Result<EnvelopeResult> {
    cfg.validate()?;
    let t = arm.len();
    if t < 2 {
        return Err(Error::RegionTooShort { len: t });
    }
    if arm.orientations.len() != t || arm.gripper.len() != t {
        return Err(Error::InvalidTrajectory(
            "arm track sequences must share one length".into(),
        ));
    }
    let partition = partition_phases(&arm.gripper, cfg.r)?;
    let mut positions = vec![Vec3::ZERO; t];
    let mut regions = Vec::with_capacity(partition.regions().len());
    for region in partition.regions() {
        let raw = &arm.positions[region.start..=region.end];
        let beta = match region.kind {
            RegionKind::Dense => cfg.boundary_blend,
            RegionKind::Sparse => 0.0,
        };
        let (samples, fit) = if raw.len() == 1 {
            // A one-sample region is its own envelope.
            (
                raw.to_vec(),
                RegionFit {
                    control_points: 1,
                    s_best: 0.0,
                    fallback_used: false,
                    iterations: 0,
                    score_trace: vec![0.0],
                    insertions: Vec::new(),
                },
            )
        } else {
            let (eps, k0) = match region.kind {
                RegionKind::Dense => (cfg.eps_dense, cfg.k0_dense),
                RegionKind::Sparse => (cfg.eps_sparse, cfg.k0_sparse),
            };
            let initial = uniform_indices(raw.len(), k0);
            let env = greedy_envelope(raw, eps, cfg, &initial)?;
            (env.samples, env.fit)
        };
        for (off, sample) in samples.into_iter().enumerate() {
            positions[region.start + off] = if beta > 0.0 {
                sample * (1.0 - beta) + raw[off] * beta
            } else {
                sample
            };
        }
        regions.push(RegionSummary {
            start: region.start,
            end: region.end,
            kind: region.kind,
            phase: region.phase,
            fit,
        });
    }
    let orientations = smooth_orientations(&arm.orientations, cfg.karcher_halfwidth, &partition)?;
    Ok(EnvelopeResult {
        positions,
        orientations,
        regions,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn line_arm(n: usize, contact_split: Option<usize>) -> ArmTrack {
        ArmTrack {
            positions: (0..n)
                .map(|i| Vec3::new(i as f64 / (n - 1) as f64, 0.0, 0.0))
                .collect(),
            orientations: vec![UnitQuat::IDENTITY; n],
            gripper: (0..n)
                .map(|i| contact_split.map_or(false, |s| i >= s))
                .collect(),
            velocities: None,
        }
    }

    #[test]
    fn straight_line_reference_equals_input() {
        let cfg = TedConfig::default();
        let arm = line_arm(200, None);
        let env = build_reference(&arm, &cfg).unwrap();
        for (raw, smooth) in arm.positions.iter().zip(&env.positions) {
            assert!(raw.distance(*smooth) < 1e-9);
        }
        for (raw, smooth) in arm.orientations.iter().zip(&env.orientations) {
            assert!(raw.geodesic_angle(*smooth) < 1e-9);
        }
    }

    #[test]
    fn full_blend_pins_dense_regions_to_raw() {
        let mut cfg = TedConfig::default();
        cfg.boundary_blend = 1.0;
        // Alternating contact: every phase is a degenerate all-dense region.
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let arm = ArmTrack {
            positions: (0..n)
                .map(|_| {
                    Vec3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    )
                })
                .collect(),
            orientations: vec![UnitQuat::IDENTITY; n],
            gripper: (0..n).map(|i| i % 2 == 0).collect(),
            velocities: None,
        };
        let env = build_reference(&arm, &cfg).unwrap();
        for (raw, smooth) in arm.positions.iter().zip(&env.positions) {
            assert!(raw.distance(*smooth) < 1e-12);
        }
    }

    #[test]
    fn perpendicular_sine_leaves_residual() {
        let cfg = TedConfig::default();
        let n = 200;
        let mut arm = line_arm(n, None);
        for (i, p) in arm.positions.iter_mut().enumerate() {
            let t = i as f64 / (n - 1) as f64;
            p.y = 0.05 * (std::f64::consts::TAU * 8.0 * t).sin();
        }
        let env = build_reference(&arm, &cfg).unwrap();
        let mean: f64 = arm
            .positions
            .iter()
            .zip(&env.positions)
            .map(|(a, b)| a.distance(*b))
            .sum::<f64>()
            / n as f64;
        assert!(mean > 0.01, "mean residual {mean} too small");
    }

    #[test]
    fn output_length_matches_input_with_phases() {
        let cfg = TedConfig::default();
        let arm = line_arm(101, Some(50));
        let env = build_reference(&arm, &cfg).unwrap();
        assert_eq!(env.positions.len(), 101);
        assert_eq!(env.orientations.len(), 101);
        assert!(env.regions.len() >= 4);
        assert!(env.positions.iter().all(|p| p.is_finite()));
    }
}
