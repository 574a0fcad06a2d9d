//! Estimators and calculators for the data-quality analysis quantities:
//! conditional action variance (the noise floor), mixture and chunk-level
//! noise floors, the quadratic compounding bound, and the quality-quantity
//! trade-off curve.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::knn::KdTree;

/// Paired state/action samples, row-major with fixed dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct StateActionSet {
    states: Vec<f64>,
    actions: Vec<f64>,
    state_dim: usize,
    action_dim: usize,
}

impl StateActionSet {
    pub fn new(states: Vec<Vec<f64>>, actions: Vec<Vec<f64>>) -> Result<Self> {
        if states.len() != actions.len() {
            return Err(Error::ShapeError {
                left: states.len(),
                right: actions.len(),
            });
        }
        if states.len() < 2 {
            return Err(Error::InvalidInput(
                "need at least 2 state-action pairs".into(),
            ));
        }
        let state_dim = states[0].len();
        let action_dim = actions[0].len();
        if state_dim == 0 || action_dim == 0 {
            return Err(Error::InvalidInput("dimensions must be positive".into()));
        }
        let mut flat_s = Vec::with_capacity(states.len() * state_dim);
        let mut flat_a = Vec::with_capacity(actions.len() * action_dim);
        for (s, a) in states.iter().zip(&actions) {
            if s.len() != state_dim || a.len() != action_dim {
                return Err(Error::ShapeError {
                    left: s.len().max(a.len()),
                    right: state_dim.max(action_dim),
                });
            }
            if s.iter().chain(a.iter()).any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite sample".into()));
            }
            flat_s.extend_from_slice(s);
            flat_a.extend_from_slice(a);
        }
        Ok(StateActionSet {
            states: flat_s,
            actions: flat_a,
            state_dim,
            action_dim,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len() / self.state_dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    fn action(&self, i: usize) -> &[f64] {
        &self.actions[i * self.action_dim..(i + 1) * self.action_dim]
    }
}

/// Trace of the population covariance of the listed actions.
fn covariance_trace(data: &StateActionSet, members: &[usize]) -> f64 {
    let d = data.action_dim;
    let n = members.len() as f64;
    let mut mean = vec![0.0; d];
    for &i in members {
        for (m, v) in mean.iter_mut().zip(data.action(i)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut trace = 0.0;
    for &i in members {
        for (m, v) in mean.iter().zip(data.action(i)) {
            let diff = v - m;
            trace += diff * diff;
        }
    }
    trace / n
}

/// Estimates the expected conditional action variance (trace form) by
/// averaging the population action covariance over each sample's `knn_k`
/// nearest state neighbors, with per-dimension standardized states.
///
/// If every state is identical the whole set is one neighborhood.
pub fn conditional_action_variance(data: &StateActionSet, knn_k: usize) -> Result<f64> {
    let m = data.len();
    if knn_k < 2 {
        return Err(Error::InvalidInput(format!(
            "knn_k must be at least 2, got {knn_k}"
        )));
    }
    if m <= knn_k {
        return Err(Error::InvalidInput(format!(
            "need more samples ({m}) than neighbors ({knn_k})"
        )));
    }

    // Standardize states per dimension; a zero-variance dimension carries no
    // neighborhood information and is dropped to coordinate zero.
    let d = data.state_dim;
    let mut mu = vec![0.0; d];
    for i in 0..m {
        for (mu_d, v) in mu.iter_mut().zip(&data.states[i * d..(i + 1) * d]) {
            *mu_d += v;
        }
    }
    for v in &mut mu {
        *v /= m as f64;
    }
    let mut sigma = vec![0.0; d];
    for i in 0..m {
        for (k, v) in data.states[i * d..(i + 1) * d].iter().enumerate() {
            let diff = v - mu[k];
            sigma[k] += diff * diff;
        }
    }
    for v in &mut sigma {
        *v = (*v / m as f64).sqrt();
    }
    if sigma.iter().all(|&s| s <= f64::EPSILON) {
        let members: Vec<usize> = (0..m).collect();
        return Ok(covariance_trace(data, &members));
    }
    let mut standardized = vec![0.0; m * d];
    for i in 0..m {
        for k in 0..d {
            if sigma[k] > f64::EPSILON {
                standardized[i * d + k] = (data.states[i * d + k] - mu[k]) / sigma[k];
            }
        }
    }

    let tree = KdTree::build(&standardized, d);
    let traces: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let neighbors = tree.k_nearest(&standardized[i * d..(i + 1) * d], knn_k);
            covariance_trace(data, &neighbors)
        })
        .collect();
    Ok(traces.iter().sum::<f64>() / m as f64)
}

/// Noise floor of an `alpha` / `1 - alpha` mixture of clean and noisy
/// demonstrations with within-group variances `sigma_c2` and `sigma_n2`.
pub fn mixture_noise_floor(alpha: f64, sigma_c2: f64, sigma_n2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::DomainError(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if sigma_c2 < 0.0 || sigma_n2 < 0.0 {
        return Err(Error::DomainError("variances must be non-negative".into()));
    }
    Ok(alpha * sigma_c2 + (1.0 - alpha) * sigma_n2)
}

/// Quadratic compounding bound on rollout regret: `H^2 * epsilon`.
pub fn regret_bound(horizon: u32, epsilon: f64) -> f64 {
    let h = horizon as f64;
    h * h * epsilon
}

/// Noise floor of an `Hc`-step action chunk under stationary per-step noise.
pub fn chunk_noise_floor(chunk_horizon: u32, sigma_step2: f64) -> f64 {
    chunk_horizon as f64 * sigma_step2
}

/// Inputs for the quality-quantity trade-off curve.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityQuantityInput {
    /// Noise floor when the best `k` demonstrations are kept; index 0 is k=1.
    pub noise_floor_curve: Vec<f64>,
    /// Effective policy complexity.
    pub complexity: f64,
    /// Capacity constant scaling the estimation term.
    pub capacity: f64,
    /// State-action pairs contributed per demonstration.
    pub steps_per_demo: f64,
}

/// Expected-error curve `E(k) = noise_floor(k) + C * d / (k * T)` and its
/// 1-based argmin (ties resolved toward smaller `k`).
pub fn quality_quantity_curve(input: &QualityQuantityInput) -> Result<(Vec<f64>, usize)> {
    if input.noise_floor_curve.is_empty() {
        return Err(Error::EmptyInput("noise floor curve"));
    }
    if input.noise_floor_curve.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidInput("noise floor must be non-negative".into()));
    }
    if !(input.steps_per_demo > 0.0) {
        return Err(Error::DomainError("steps per demo must be positive".into()));
    }
    let curve: Vec<f64> = input
        .noise_floor_curve
        .iter()
        .enumerate()
        .map(|(i, &floor)| {
            let k = (i + 1) as f64;
            floor + input.capacity * input.complexity / (k * input.steps_per_demo)
        })
        .collect();
    let mut best = 0;
    for (i, v) in curve.iter().enumerate() {
        if *v < curve[best] {
            best = i;
        }
    }
    Ok((curve, best + 1))
}
