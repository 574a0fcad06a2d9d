//! Bézier evaluation and the greedy envelope fit with corridor fallback.
//!
//! The fit treats a subset of the raw samples as the control polygon of a
//! Bernstein curve, scores the curve by mean residual plus a quadratic
//! corridor penalty, and refines by inserting the raw point of maximum
//! residual until the score budget is met or the iteration cap is reached.
//! A deterministic corridor-based subdivision serves as a fallback; the
//! lower-scoring envelope wins.

use crate::envelope::TedConfig;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Evaluates the Bernstein curve of `control` at `t` by de Casteljau.
pub fn bezier_eval(control: &[Vec3], t: f64) -> Result<Vec3> {
    if control.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 control points, got {}",
            control.len()
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("t = {t} outside [0, 1]")));
    }
    Ok(de_casteljau(&mut Vec::new(), control, t))
}

pub(crate) fn de_casteljau(scratch: &mut Vec<Vec3>, control: &[Vec3], t: f64) -> Vec3 {
    scratch.clear();
    scratch.extend_from_slice(control);
    let mut m = scratch.len();
    while m > 1 {
        for i in 0..m - 1 {
            scratch[i] = scratch[i].lerp(scratch[i + 1], t);
        }
        m -= 1;
    }
    scratch[0]
}

/// `count` indices spread uniformly over `0..n`, always including both
/// endpoints. `count` is clamped to `[2, n]`.
pub fn uniform_indices(n: usize, count: usize) -> Vec<usize> {
    debug_assert!(n >= 2);
    let count = count.clamp(2, n);
    let step = (n - 1) as f64 / (count - 1) as f64;
    let mut idxs: Vec<usize> = (0..count).map(|m| (m as f64 * step).round() as usize).collect();
    idxs.dedup();
    idxs
}

/// Fitting metadata for one region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionFit {
    /// Control polygon size of the best greedy iterate.
    pub control_points: usize,
    /// Final envelope score (mean residual plus corridor penalty).
    pub s_best: f64,
    /// Whether the corridor subdivision beat the greedy fit.
    pub fallback_used: bool,
    /// Greedy iterations executed.
    pub iterations: usize,
    /// Running best score after each iteration; non-increasing.
    pub score_trace: Vec<f64>,
    /// Raw indices inserted into the control polygon, in order.
    pub insertions: Vec<usize>,
}

/// A fitted region: envelope samples (one per input sample) plus metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionEnvelope {
    pub samples: Vec<Vec3>,
    pub fit: RegionFit,
}

fn score(points: &[Vec3], samples: &[Vec3], eps: f64, residuals: &mut [f64]) -> (f64, f64) {
    let denom = (points.len() - 1) as f64;
    let mut area = 0.0;
    let mut penalty = 0.0;
    for (i, (p, s)) in points.iter().zip(samples).enumerate() {
        let d = p.distance(*s);
        residuals[i] = d;
        area += d;
        let over = d - eps;
        if over > 0.0 {
            penalty += over * over;
        }
    }
    (area / denom, penalty)
}

fn polygon_samples(points: &[Vec3], ctrl_indices: &[usize], scratch: &mut Vec<Vec3>) -> Vec<Vec3> {
    let n = points.len();
    let denom = (n - 1) as f64;
    let ctrl: Vec<Vec3> = ctrl_indices.iter().map(|&j| points[j]).collect();
    (0..n)
        .map(|i| de_casteljau(scratch, &ctrl, i as f64 / denom))
        .collect()
}

/// Greedy keep-best envelope fit of one region.
///
/// `initial` gives the starting control indices (sorted, containing `0` and
/// `n - 1`); the per-region corridor width is `eps`. If the uniform chord
/// already reproduces the samples within `cfg.eps_num` the fit is skipped:
/// refinement cannot improve on a zero-residual envelope.
pub fn greedy_envelope(
    points: &[Vec3],
    eps: f64,
    cfg: &TedConfig,
    initial: &[usize],
) -> Result<RegionEnvelope> {
    let n = points.len();
    if n < 2 {
        return Err(Error::RegionTooShort { len: n });
    }
    if !(eps > 0.0) {
        return Err(Error::DomainError(format!(
            "corridor width must be positive, got {eps}"
        )));
    }
    if initial.first() != Some(&0)
        || initial.last() != Some(&(n - 1))
        || initial.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidInput(
            "initial control indices must be strictly increasing and include both endpoints"
                .into(),
        ));
    }
    let budget = cfg.area_budget.unwrap_or(eps * 0.5);
    let tau_ref = budget;
    let denom = (n - 1) as f64;

    let chord: Vec<Vec3> = (0..n)
        .map(|i| points[0].lerp(points[n - 1], i as f64 / denom))
        .collect();
    let mut residuals = vec![0.0; n];
    let (chord_area, chord_penalty) = score(points, &chord, eps, &mut residuals);
    if residuals.iter().cloned().fold(0.0, f64::max) <= cfg.eps_num {
        let s = chord_area + chord_penalty;
        return Ok(RegionEnvelope {
            samples: chord,
            fit: RegionFit {
                control_points: 2,
                s_best: s,
                fallback_used: false,
                iterations: 1,
                score_trace: vec![s],
                insertions: Vec::new(),
            },
        });
    }

    let mut ctrl: Vec<usize> = initial.to_vec();
    let mut scratch = Vec::new();
    let mut best_samples = Vec::new();
    let mut best_controls = ctrl.len();
    let mut s_best = f64::INFINITY;
    let mut trace = Vec::with_capacity(cfg.m_ref);
    let mut insertions = Vec::new();
    let mut iterations = 0;

    for _ in 0..cfg.m_ref {
        iterations += 1;
        let samples = polygon_samples(points, &ctrl, &mut scratch);
        let (area, penalty) = score(points, &samples, eps, &mut residuals);
        let s_cur = area + penalty;
        if s_cur < s_best {
            s_best = s_cur;
            best_samples = samples;
            best_controls = ctrl.len();
        }
        trace.push(s_best);
        if area <= budget && penalty <= cfg.eps_num {
            break;
        }
        let mut j_star = 0;
        let mut d_max = f64::NEG_INFINITY;
        for (i, &d) in residuals.iter().enumerate() {
            if d > d_max {
                d_max = d;
                j_star = i;
            }
        }
        if d_max <= tau_ref {
            break;
        }
        match ctrl.binary_search(&j_star) {
            // The argmax is already a control point; re-inserting cannot
            // change the polygon, so further iterations would repeat exactly.
            Ok(_) => break,
            Err(pos) => {
                ctrl.insert(pos, j_star);
                insertions.push(j_star);
            }
        }
    }

    let corridor = corridor_fallback(points, eps, initial.len());
    let (corr_area, corr_penalty) = score(points, &corridor, eps, &mut residuals);
    let s_corr = corr_area + corr_penalty;
    let fallback_used = s_corr < s_best;
    let (samples, s_best) = if fallback_used {
        (corridor, s_corr)
    } else {
        (best_samples, s_best)
    };
    Ok(RegionEnvelope {
        samples,
        fit: RegionFit {
            control_points: best_controls,
            s_best,
            fallback_used,
            iterations,
            score_trace: trace,
            insertions,
        },
    })
}

/// Corridor-driven recursive subdivision envelope.
///
/// Fits a single Bernstein segment with up to `k0` uniformly indexed control
/// points; wherever a residual exceeds `eps` the region is split at the
/// argmax-residual index and both halves are refit, down to a minimum segment
/// of two samples and a recursion depth of `ceil(log2(n))`.
pub fn corridor_fallback(points: &[Vec3], eps: f64, k0: usize) -> Vec<Vec3> {
    corridor_fallback_traced(points, eps, k0).0
}

pub(crate) fn corridor_fallback_traced(
    points: &[Vec3],
    eps: f64,
    k0: usize,
) -> (Vec<Vec3>, Vec<usize>) {
    let n = points.len();
    debug_assert!(n >= 2);
    let depth_cap = usize::BITS as usize - (n - 1).leading_zeros() as usize;
    let mut out = Vec::with_capacity(n);
    let mut splits = Vec::new();
    let mut scratch = Vec::new();
    subdivide(points, 0, eps, k0, 0, depth_cap, &mut out, &mut splits, &mut scratch);
    debug_assert_eq!(out.len(), n);
    (out, splits)
}

#[allow(clippy::too_many_arguments)]
fn subdivide(
    seg: &[Vec3],
    offset: usize,
    eps: f64,
    k0: usize,
    depth: usize,
    depth_cap: usize,
    out: &mut Vec<Vec3>,
    splits: &mut Vec<usize>,
    scratch: &mut Vec<Vec3>,
) {
    let m = seg.len();
    let idxs = uniform_indices(m, k0);
    let samples = polygon_samples(seg, &idxs, scratch);
    let mut j_star = 0;
    let mut d_max = f64::NEG_INFINITY;
    for (i, (p, s)) in seg.iter().zip(&samples).enumerate() {
        let d = p.distance(*s);
        if d > d_max {
            d_max = d;
            j_star = i;
        }
    }
    if d_max <= eps || m <= 2 || depth >= depth_cap {
        // Segments share their boundary sample; endpoint interpolation makes
        // the shared value exact, so skipping the overlap keeps C0 joins.
        let skip = out.len() - offset;
        out.extend(samples.into_iter().skip(skip));
        return;
    }
    let j = j_star.clamp(1, m - 2);
    splits.push(offset + j);
    subdivide(&seg[..=j], offset, eps, k0, depth + 1, depth_cap, out, splits, scratch);
    subdivide(&seg[j..], offset + j, eps, k0, depth + 1, depth_cap, out, splits, scratch);
}
