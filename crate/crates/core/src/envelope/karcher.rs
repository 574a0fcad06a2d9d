//! Geodesic (Karcher) averaging of rotations and sliding-window orientation
//! smoothing that never crosses contact-phase boundaries.

use crate::envelope::partition::RegionPartition;
use crate::error::{Error, Result};
use crate::geometry::{RotationVector, UnitQuat, Vec3};

/// Riemannian center of mass of a set of rotations.
///
/// Iterative tangent-space averaging seeded at the first element; stops when
/// the mean update norm drops below 1e-9 or after 100 iterations.
pub fn karcher_mean(quats: &[UnitQuat]) -> Result<UnitQuat> {
    if quats.is_empty() {
        return Err(Error::EmptyInput("quaternion list"));
    }
    let mut mean = quats[0];
    for _ in 0..100 {
        let mut acc = Vec3::ZERO;
        for q in quats {
            acc += (mean.conjugate() * *q).to_rotation_vector().0;
        }
        let update = acc / quats.len() as f64;
        mean = mean * UnitQuat::from_rotation_vector(RotationVector(update));
        if update.norm() < 1e-9 {
            break;
        }
    }
    Ok(mean)
}

/// Per-sample Karcher mean over a centered window of half-width `halfwidth`,
/// truncated at phase boundaries so contact transitions are not smeared.
pub fn smooth_orientations(
    quats: &[UnitQuat],
    halfwidth: usize,
    partition: &RegionPartition,
) -> Result<Vec<UnitQuat>> {
    if quats.len() != partition.len() {
        return Err(Error::ShapeError {
            left: quats.len(),
            right: partition.len(),
        });
    }
    // Phase span per sample, resolved once.
    let mut span = vec![(0usize, 0usize); quats.len()];
    for region in partition.regions() {
        let phase_span = partition
            .phase_span(region.phase)
            .expect("region phase must exist");
        for s in span.iter_mut().take(region.end + 1).skip(region.start) {
            *s = phase_span;
        }
    }
    let mut out = Vec::with_capacity(quats.len());
    for (t, &(ps, pe)) in span.iter().enumerate() {
        let lo = t.saturating_sub(halfwidth).max(ps);
        let hi = (t + halfwidth).min(pe);
        out.push(karcher_mean(&quats[lo..=hi])?);
    }
    Ok(out)
}
