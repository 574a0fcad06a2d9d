//! Dynamic time warping (exact and multiscale) and the trajectory-envelope
//! distance built on it.
//!
//! The exact solver runs the full quadratic dynamic program and doubles as
//! the correctness oracle for the multiscale variant, which coarsens both
//! sequences, aligns recursively, and refines inside a window of the given
//! radius around the projected path.

use crate::envelope::{build_reference, TedConfig};
use crate::error::{Error, Result};
use crate::geometry::{UnitQuat, Vec3};
use crate::model::{require_valid, Trajectory};

/// Sample types that can be averaged pairwise for multiscale coarsening.
pub trait DtwPoint: Clone {
    fn midpoint(&self, other: &Self) -> Self;
}

impl DtwPoint for f64 {
    fn midpoint(&self, other: &Self) -> Self {
        0.5 * (self + other)
    }
}

/// One pose sample: position plus orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub pos: Vec3,
    pub quat: UnitQuat,
}

impl DtwPoint for PoseSample {
    fn midpoint(&self, other: &Self) -> Self {
        PoseSample {
            pos: self.pos.lerp(other.pos, 0.5),
            quat: self.quat.slerp(other.quat, 0.5),
        }
    }
}

/// Composite pose distance: Euclidean on positions, geodesic on rotations
/// weighted by `w_ori`.
#[derive(Debug, Clone, Copy)]
pub struct PairCost {
    pub w_ori: f64,
}

impl PairCost {
    pub fn eval(&self, a: &PoseSample, b: &PoseSample) -> f64 {
        let d2 = (a.pos - b.pos).norm_squared();
        let theta = a.quat.geodesic_angle(b.quat);
        (d2 + self.w_ori * self.w_ori * theta * theta).sqrt()
    }
}

/// A monotone alignment between two sequences and its total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentPath {
    /// `(t, s)` index pairs from `(0, 0)` to `(T-1, S-1)`.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

impl AlignmentPath {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Average cost per matched pair.
    pub fn mean_cost(&self) -> f64 {
        self.total_cost / self.pairs.len() as f64
    }

    /// Checks the path invariants against the sequence lengths.
    pub fn is_valid(&self, t_len: usize, s_len: usize) -> bool {
        if self.pairs.first() != Some(&(0, 0)) {
            return false;
        }
        if self.pairs.last() != Some(&(t_len - 1, s_len - 1)) {
            return false;
        }
        self.pairs.windows(2).all(|w| {
            let (dt, ds) = (w[1].0 as i64 - w[0].0 as i64, w[1].1 as i64 - w[0].1 as i64);
            matches!((dt, ds), (1, 0) | (0, 1) | (1, 1))
        })
    }
}

/// Per-row column spans `[lo, hi)`; rows must be non-empty and the spans
/// monotone so the dynamic program stays connected.
struct Window {
    spans: Vec<(usize, usize)>,
}

impl Window {
    fn full(t_len: usize, s_len: usize) -> Self {
        Window {
            spans: vec![(0, s_len); t_len],
        }
    }
}

/// Windowed dynamic program with deterministic backtracking that prefers the
/// diagonal step, then advancing the first sequence, then the second.
fn dp<P, F>(a: &[P], b: &[P], cost: &F, window: &Window) -> AlignmentPath
where
    F: Fn(&P, &P) -> f64,
{
    let t_len = a.len();
    let s_len = b.len();
    debug_assert_eq!(window.spans.len(), t_len);

    let mut offsets = Vec::with_capacity(t_len);
    let mut total = 0usize;
    for &(lo, hi) in &window.spans {
        debug_assert!(lo < hi && hi <= s_len);
        offsets.push(total);
        total += hi - lo;
    }
    let mut acc = vec![f64::INFINITY; total];
    let cell = |acc: &[f64], i: usize, j: usize| -> f64 {
        let (lo, hi) = window.spans[i];
        if j < lo || j >= hi {
            f64::INFINITY
        } else {
            acc[offsets[i] + (j - lo)]
        }
    };

    for i in 0..t_len {
        let (lo, hi) = window.spans[i];
        for j in lo..hi {
            let c = cost(&a[i], &b[j]);
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 && j > 0 {
                    best = best.min(cell(&acc, i - 1, j - 1));
                }
                if i > 0 {
                    best = best.min(cell(&acc, i - 1, j));
                }
                if j > 0 {
                    best = best.min(cell(&acc, i, j - 1));
                }
                best
            };
            acc[offsets[i] + (j - lo)] = c + prev;
        }
    }

    let mut pairs = Vec::with_capacity(t_len + s_len);
    let (mut i, mut j) = (t_len - 1, s_len - 1);
    pairs.push((i, j));
    while i > 0 || j > 0 {
        let diag = if i > 0 && j > 0 {
            cell(&acc, i - 1, j - 1)
        } else {
            f64::INFINITY
        };
        let up = if i > 0 { cell(&acc, i - 1, j) } else { f64::INFINITY };
        let left = if j > 0 { cell(&acc, i, j - 1) } else { f64::INFINITY };
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        pairs.push((i, j));
    }
    pairs.reverse();
    AlignmentPath {
        total_cost: cell(&acc, t_len - 1, s_len - 1),
        pairs,
    }
}

/// Globally optimal alignment via the full `O(T * S)` dynamic program.
pub fn dtw_exact<P, F>(a: &[P], b: &[P], cost: F) -> Result<AlignmentPath>
where
    F: Fn(&P, &P) -> f64,
{
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("alignment sequence"));
    }
    Ok(dp(a, b, &cost, &Window::full(a.len(), b.len())))
}

fn coarsen<P: DtwPoint>(x: &[P]) -> Vec<P> {
    let mut out = Vec::with_capacity(x.len() / 2 + 1);
    let mut chunks = x.chunks_exact(2);
    for pair in &mut chunks {
        out.push(pair[0].midpoint(&pair[1]));
    }
    if let [last] = chunks.remainder() {
        out.push(last.clone());
    }
    out
}

fn expand_window(
    coarse: &[(usize, usize)],
    t_len: usize,
    s_len: usize,
    radius: usize,
) -> Window {
    let mut lo = vec![usize::MAX; t_len];
    let mut hi = vec![0usize; t_len];
    let mark = |i: usize, j: usize, lo: &mut Vec<usize>, hi: &mut Vec<usize>| {
        if i < t_len {
            let j = j.min(s_len - 1);
            lo[i] = lo[i].min(j);
            hi[i] = hi[i].max(j);
        }
    };
    for &(ci, cj) in coarse {
        for di in 0..2 {
            for dj in 0..2 {
                mark(2 * ci + di, 2 * cj + dj, &mut lo, &mut hi);
            }
        }
    }
    mark(0, 0, &mut lo, &mut hi);
    mark(t_len - 1, s_len - 1, &mut lo, &mut hi);

    let mut spans = Vec::with_capacity(t_len);
    for i in 0..t_len {
        let r0 = i.saturating_sub(radius);
        let r1 = (i + radius).min(t_len - 1);
        let mut l = usize::MAX;
        let mut h = 0usize;
        for k in r0..=r1 {
            l = l.min(lo[k]);
            h = h.max(hi[k]);
        }
        spans.push((l.saturating_sub(radius), (h + radius).min(s_len - 1) + 1));
    }
    Window { spans }
}

/// Multiscale alignment: recursively coarsens by two, projects the coarse
/// path, and refines inside a window expanded by `radius`. For
/// `radius >= max(T, S)` the result equals [`dtw_exact`].
pub fn fastdtw<P, F>(a: &[P], b: &[P], cost: F, radius: usize) -> Result<AlignmentPath>
where
    P: DtwPoint,
    F: Fn(&P, &P) -> f64,
{
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("alignment sequence"));
    }
    Ok(fastdtw_rec(a, b, &cost, radius))
}

fn fastdtw_rec<P, F>(a: &[P], b: &[P], cost: &F, radius: usize) -> AlignmentPath
where
    P: DtwPoint,
    F: Fn(&P, &P) -> f64,
{
    let min_size = radius + 2;
    if a.len() <= min_size || b.len() <= min_size {
        return dp(a, b, cost, &Window::full(a.len(), b.len()));
    }
    let coarse_a = coarsen(a);
    let coarse_b = coarsen(b);
    let coarse = fastdtw_rec(&coarse_a, &coarse_b, cost, radius);
    let window = expand_window(&coarse.pairs, a.len(), b.len(), radius);
    dp(a, b, cost, &window)
}

/// Trajectory-envelope distance: mean per-pair cost along the multiscale
/// alignment between each arm and its smoothed reference, averaged over
/// arms. Non-negative; zero (to numerical precision) exactly when the
/// reference reproduces the raw trajectory.
pub fn ted(traj: &Trajectory, cfg: &TedConfig) -> Result<f64> {
    require_valid(traj)?;
    cfg.validate()?;
    let cost = PairCost { w_ori: cfg.w_ori };
    let mut total = 0.0;
    for arm in &traj.arms {
        let reference = build_reference(arm, cfg)?;
        let raw: Vec<PoseSample> = arm
            .positions
            .iter()
            .zip(&arm.orientations)
            .map(|(&pos, &quat)| PoseSample { pos, quat })
            .collect();
        let smooth: Vec<PoseSample> = reference
            .positions
            .iter()
            .zip(&reference.orientations)
            .map(|(&pos, &quat)| PoseSample { pos, quat })
            .collect();
        let path = fastdtw(&raw, &smooth, |x, y| cost.eval(x, y), cfg.dtw_radius)?;
        total += path.mean_cost();
    }
    Ok(total / traj.arms.len() as f64)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::ArmTrack;
    use crate::oracles;

    fn scalar_cost(a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }

    #[test]
    fn identical_sequences_align_on_the_diagonal() {
        let a = vec![0.0, 1.0, 2.0, 3.0];
        let path = dtw_exact(&a, &a, scalar_cost).unwrap();
        assert_eq!(path.total_cost, 0.0);
        assert_eq!(path.pairs, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn three_by_two_hand_table() {
        let a = vec![0.0, 1.0, 2.0];
        let b = vec![0.0, 2.0];
        let path = dtw_exact(&a, &b, scalar_cost).unwrap();
        assert_eq!(path.total_cost, 1.0);
        assert_eq!(path.pairs, vec![(0, 0), (1, 0), (2, 1)]);
        let (oracle_cost, oracle_path) = oracles::naive_dtw(&a, &b);
        assert_eq!(path.total_cost, oracle_cost);
        assert_eq!(path.pairs, oracle_path);
    }

    #[test]
    fn reversed_monotone_sequence_costs_more_than_zero() {
        let a: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().rev().cloned().collect();
        let path = dtw_exact(&a, &b, scalar_cost).unwrap();
        assert!(path.total_cost > 0.0);
    }

    #[test]
    fn fastdtw_identity_costs_zero() {
        let a: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let path = fastdtw(&a, &a, scalar_cost, 1).unwrap();
        assert_eq!(path.total_cost, 0.0);
    }

    #[test]
    fn fastdtw_with_full_radius_equals_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..32);
            let m = rng.gen_range(2..32);
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let exact = dtw_exact(&a, &b, scalar_cost).unwrap();
            let fast = fastdtw(&a, &b, scalar_cost, 32).unwrap();
            assert_eq!(exact.total_cost.to_bits(), fast.total_cost.to_bits());
            assert_eq!(exact.pairs, fast.pairs);
        }
    }

    #[test]
    fn fastdtw_radius_one_close_to_exact_on_smooth_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let (a, b) = oracles::smooth_pair(256, &mut rng);
            let exact = dtw_exact(&a, &b, scalar_cost).unwrap();
            let fast = fastdtw(&a, &b, scalar_cost, 1).unwrap();
            assert!(fast.total_cost >= exact.total_cost - 1e-12);
            let rel = (fast.total_cost - exact.total_cost) / exact.total_cost.max(1e-12);
            assert!(rel < 0.05, "relative gap {rel} too large");
        }
    }

    #[test]
    fn ted_zero_on_straight_line() {
        let n = 200;
        let arm = ArmTrack {
            positions: (0..n)
                .map(|i| Vec3::new(i as f64 / (n - 1) as f64, 0.0, 0.0))
                .collect(),
            orientations: vec![UnitQuat::IDENTITY; n],
            gripper: vec![false; n],
            velocities: None,
        };
        let traj = Trajectory {
            id: "line".into(),
            dt: 0.05,
            arms: vec![arm],
            metadata: Default::default(),
        };
        let score = ted(&traj, &TedConfig::default()).unwrap();
        assert!(score < 1e-9, "score {score}");
    }

    #[test]
    fn ted_translation_invariant() {
        let n = 120;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let positions: Vec<Vec3> = (0..n)
            .map(|i| {
                Vec3::new(
                    0.01 * i as f64,
                    0.02 * rng.gen_range(-1.0..1.0),
                    0.01 * rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let arm = ArmTrack {
            orientations: vec![UnitQuat::IDENTITY; n],
            gripper: vec![false; n],
            velocities: None,
            positions,
        };
        let make = |arm: ArmTrack| Trajectory {
            id: "x".into(),
            dt: 0.05,
            arms: vec![arm],
            metadata: Default::default(),
        };
        let shift = Vec3::new(3.0, -7.0, 1.0);
        let shifted = ArmTrack {
            positions: arm.positions.iter().map(|p| *p + shift).collect(),
            ..arm.clone()
        };
        let cfg = TedConfig::default();
        let a = ted(&make(arm), &cfg).unwrap();
        let b = ted(&make(shifted), &cfg).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn ted_orientation_cost_scales_with_weight() {
        // Perfect positions; only a fixed-magnitude orientation wobble
        // remains, so the score scales linearly with the orientation weight.
        let n = 200;
        let theta = 0.02;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let orientations: Vec<UnitQuat> = (0..n)
            .map(|_| {
                let axis = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                UnitQuat::from_axis_angle(axis, if rng.gen_bool(0.5) { theta } else { -theta })
            })
            .collect();
        let arm = ArmTrack {
            positions: (0..n)
                .map(|i| Vec3::new(5.0 * i as f64 / (n - 1) as f64, 0.0, 0.0))
                .collect(),
            gripper: vec![false; n],
            velocities: None,
            orientations,
        };
        let traj = Trajectory {
            id: "wobble".into(),
            dt: 0.05,
            arms: vec![arm],
            metadata: Default::default(),
        };
        let score = |w: f64| {
            let mut cfg = TedConfig::default();
            cfg.w_ori = w;
            ted(&traj, &cfg).unwrap()
        };
        let (s1, s2, s4) = (score(0.125), score(0.25), score(0.5));
        assert!((s2 / s1 - 2.0).abs() < 0.1, "ratio {}", s2 / s1);
        assert!((s4 / s2 - 2.0).abs() < 0.1, "ratio {}", s4 / s2);
    }

    #[test]
    fn ted_large_input_stays_within_budget() {
        let n = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let positions: Vec<Vec3> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                Vec3::new(t, 0.002 * rng.gen_range(-1.0..1.0), 0.0)
            })
            .collect();
        let arm = ArmTrack {
            orientations: vec![UnitQuat::IDENTITY; n],
            gripper: (0..n).map(|i| i >= n / 2).collect(),
            velocities: None,
            positions,
        };
        let traj = Trajectory {
            id: "big".into(),
            dt: 0.01,
            arms: vec![arm],
            metadata: Default::default(),
        };
        let cfg = TedConfig::default();
        let start = std::time::Instant::now();
        let score = ted(&traj, &cfg).unwrap();
        let elapsed = start.elapsed();
        assert!(score.is_finite());
        assert!(
            elapsed.as_millis() < 250,
            "ted on T=10^4 took {elapsed:?}"
        );
    }

    proptest! {
        #[test]
        fn paths_satisfy_invariants(
            a in prop::collection::vec(-10.0f64..10.0, 1..40),
            b in prop::collection::vec(-10.0f64..10.0, 1..40),
            radius in 0usize..4,
        ) {
            let exact = dtw_exact(&a, &b, scalar_cost).unwrap();
            prop_assert!(exact.is_valid(a.len(), b.len()));
            let fast = fastdtw(&a, &b, scalar_cost, radius).unwrap();
            prop_assert!(fast.is_valid(a.len(), b.len()));
            prop_assert!(fast.total_cost >= exact.total_cost - 1e-12);
        }
    }
}
