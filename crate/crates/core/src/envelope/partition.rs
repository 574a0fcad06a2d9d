//! Contact-aware phase partition: maximal constant-contact runs split into
//! dense boundary regions and a sparse interior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a region is a dense phase boundary or the sparse interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Dense,
    Sparse,
}

/// One contiguous index range `[start, end]` (inclusive) of a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub start: usize,
    pub end: usize,
    pub kind: RegionKind,
    pub phase: usize,
    pub contact: bool,
}

impl Region {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Ordered regions tiling `[0, T-1]` without gaps or overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPartition {
    regions: Vec<Region>,
    len: usize,
}

impl RegionPartition {
    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Total number of samples covered.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn phase_count(&self) -> usize {
        self.regions.last().map_or(0, |r| r.phase + 1)
    }

    /// Inclusive index span of one phase.
    pub fn phase_span(&self, phase: usize) -> Option<(usize, usize)> {
        let mut span: Option<(usize, usize)> = None;
        for r in &self.regions {
            if r.phase == phase {
                span = Some(match span {
                    None => (r.start, r.end),
                    Some((s, e)) => (s.min(r.start), e.max(r.end)),
                });
            }
        }
        span
    }

    /// Phase index of a sample.
    pub fn phase_of(&self, index: usize) -> Option<usize> {
        self.regions
            .iter()
            .find(|r| r.start <= index && index <= r.end)
            .map(|r| r.phase)
    }

    /// Checks the tiling invariant; used by tests and debug assertions.
    pub fn tiles_exactly(&self) -> bool {
        let mut next = 0usize;
        for r in &self.regions {
            if r.start != next || r.end < r.start {
                return false;
            }
            next = r.end + 1;
        }
        next == self.len
    }
}

/// Splits a contact signal into phases and per-phase dense/sparse regions.
///
/// Each maximal constant-contact run of length `n` gets dense prefix and
/// suffix regions of `max(1, floor(r * n))` samples; runs too short to hold a
/// sparse interior become a single dense region.
pub fn partition_phases(gripper: &[bool], r: f64) -> Result<RegionPartition> {
    if gripper.is_empty() {
        return Err(Error::EmptyInput("gripper sequence"));
    }
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::DomainError(format!(
            "boundary fraction must lie in (0, 0.5), got {r}"
        )));
    }
    let mut regions = Vec::new();
    let mut phase = 0usize;
    let mut start = 0usize;
    while start < gripper.len() {
        let contact = gripper[start];
        let mut end = start;
        while end + 1 < gripper.len() && gripper[end + 1] == contact {
            end += 1;
        }
        let n = end - start + 1;
        let boundary = ((r * n as f64).floor() as usize).max(1);
        if n <= 2 * boundary {
            regions.push(Region {
                start,
                end,
                kind: RegionKind::Dense,
                phase,
                contact,
            });
        } else {
            regions.push(Region {
                start,
                end: start + boundary - 1,
                kind: RegionKind::Dense,
                phase,
                contact,
            });
            regions.push(Region {
                start: start + boundary,
                end: end - boundary,
                kind: RegionKind::Sparse,
                phase,
                contact,
            });
            regions.push(Region {
                start: end - boundary + 1,
                end,
                kind: RegionKind::Dense,
                phase,
                contact,
            });
        }
        phase += 1;
        start = end + 1;
    }
    Ok(RegionPartition {
        regions,
        len: gripper.len(),
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn two_phase_example() {
        let gripper = [false, false, false, false, false, true, true, true, true, true];
        let p = partition_phases(&gripper, 0.2).unwrap();
        assert!(p.tiles_exactly());
        assert_eq!(p.phase_count(), 2);
        let regions = p.regions();
        assert_eq!(regions.len(), 6);
        // Each 5-sample phase: dense first index, sparse middle 3, dense last.
        assert_eq!(
            (regions[0].start, regions[0].end, regions[0].kind),
            (0, 0, RegionKind::Dense)
        );
        assert_eq!(
            (regions[1].start, regions[1].end, regions[1].kind),
            (1, 3, RegionKind::Sparse)
        );
        assert_eq!(
            (regions[2].start, regions[2].end, regions[2].kind),
            (4, 4, RegionKind::Dense)
        );
        assert_eq!(regions[3].start, 5);
        assert!(regions[3].contact);
    }

    #[test]
    fn constant_contact_run_of_ten() {
        let p = partition_phases(&[true; 10], 0.2).unwrap();
        let regions = p.regions();
        assert_eq!(regions.len(), 3);
        assert_eq!((regions[0].start, regions[0].end), (0, 1));
        assert_eq!((regions[1].start, regions[1].end), (2, 7));
        assert_eq!((regions[2].start, regions[2].end), (8, 9));
    }

    #[test]
    fn alternating_contact_degenerates_to_dense_phases() {
        let p = partition_phases(&[false, true, false, true], 0.2).unwrap();
        let regions = p.regions();
        assert_eq!(regions.len(), 4);
        assert!(regions
            .iter()
            .all(|r| r.kind == RegionKind::Dense && r.len() == 1));
        assert_eq!(p.phase_count(), 4);
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(matches!(
            partition_phases(&[], 0.2),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn tiling_holds_on_random_contact_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..1000 {
            let n = rng.gen_range(1..200);
            let gripper: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
            let p = partition_phases(&gripper, 0.2).unwrap();
            assert!(p.tiles_exactly());
            // Contact state constant per phase and order dense-sparse-dense.
            for phase in 0..p.phase_count() {
                let kinds: Vec<_> = p
                    .regions()
                    .iter()
                    .filter(|r| r.phase == phase)
                    .map(|r| r.kind)
                    .collect();
                assert!(matches!(
                    kinds.as_slice(),
                    [RegionKind::Dense]
                        | [RegionKind::Dense, RegionKind::Sparse, RegionKind::Dense]
                ));
            }
        }
    }
}
