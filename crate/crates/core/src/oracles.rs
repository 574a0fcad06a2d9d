//! Self-contained reference computations used to cross-check the metric
//! implementations. Everything here is deliberately brute-force and shares
//! no code with the production paths it validates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Vec3;
use crate::stats::standard_normal;

/// Full-table scalar dynamic time warping with absolute-difference cost and
/// diagonal-first backtracking.
pub fn naive_dtw(a: &[f64], b: &[f64]) -> (f64, Vec<(usize, usize)>) {
    let (n, m) = (a.len(), b.len());
    let mut acc = vec![vec![f64::INFINITY; m]; n];
    for i in 0..n {
        for j in 0..m {
            let c = (a[i] - b[j]).abs();
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let mut p = f64::INFINITY;
                if i > 0 && j > 0 {
                    p = p.min(acc[i - 1][j - 1]);
                }
                if i > 0 {
                    p = p.min(acc[i - 1][j]);
                }
                if j > 0 {
                    p = p.min(acc[i][j - 1]);
                }
                p
            };
            acc[i][j] = c + prev;
        }
    }
    let mut path = vec![(n - 1, m - 1)];
    let (mut i, mut j) = (n - 1, m - 1);
    while i > 0 || j > 0 {
        let diag = if i > 0 && j > 0 {
            acc[i - 1][j - 1]
        } else {
            f64::INFINITY
        };
        let up = if i > 0 { acc[i - 1][j] } else { f64::INFINITY };
        let left = if j > 0 { acc[i][j - 1] } else { f64::INFINITY };
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push((i, j));
    }
    path.reverse();
    (acc[n - 1][m - 1], path)
}

/// One-sided magnitudes of the unnormalized DFT, evaluated directly in
/// quadratic time.
pub fn direct_dft_magnitudes(values: &[f64]) -> Vec<f64> {
    let t = values.len();
    let mut out = Vec::with_capacity(t / 2 + 1);
    for k in 0..=t / 2 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (n, v) in values.iter().enumerate() {
            let angle = -std::f64::consts::TAU * k as f64 * n as f64 / t as f64;
            re += v * angle.cos();
            im += v * angle.sin();
        }
        out.push((re * re + im * im).sqrt());
    }
    out
}

/// Spectral arc length evaluated from the direct DFT.
pub fn sal_direct(values: &[f64], dt: f64, epsilon: f64) -> f64 {
    let t = values.len();
    let mags = direct_dft_magnitudes(values);
    let mut arc = 0.0;
    let mut prev_f = 0.0;
    let mut prev_l = (mags[0] + epsilon).ln();
    for (k, magnitude) in mags.iter().enumerate().skip(1) {
        let f = k as f64 / (t as f64 * dt);
        let l = (magnitude + epsilon).ln();
        arc += ((f - prev_f).powi(2) + (l - prev_l).powi(2)).sqrt();
        prev_f = f;
        prev_l = l;
    }
    -arc
}

/// Direct Bernstein-basis evaluation of a Bézier curve.
pub fn bezier_bernstein(control: &[Vec3], t: f64) -> Vec3 {
    let k = control.len() - 1;
    // Pascal row of binomial coefficients.
    let mut binom = vec![1.0f64; k + 1];
    for i in 1..=k {
        binom[i] = binom[i - 1] * (k - i + 1) as f64 / i as f64;
    }
    let mut acc = Vec3::ZERO;
    for (j, point) in control.iter().enumerate() {
        let basis = binom[j] * t.powi(j as i32) * (1.0 - t).powi((k - j) as i32);
        acc += *point * basis;
    }
    acc
}

/// Peak speed of a minimum-jerk point-to-point motion of length `l` over
/// `duration`, found by scanning the closed-form rate polynomial.
pub fn min_jerk_peak_speed(l: f64, duration: f64) -> f64 {
    let mut peak = 0.0f64;
    let steps = 200_001;
    for i in 0..steps {
        let tau = i as f64 / (steps - 1) as f64;
        let rate = 30.0 * tau.powi(2) - 60.0 * tau.powi(3) + 30.0 * tau.powi(4);
        peak = peak.max(rate);
    }
    peak * l / duration
}

/// Monte-Carlo ratio between the variance of an `hc`-step chunk sum of iid
/// per-step noise and the per-step variance.
pub fn chunk_variance_ratio(hc: usize, chunks: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums = Vec::with_capacity(chunks);
    let mut step_sq = 0.0;
    let mut step_mean = 0.0;
    let total = chunks * hc;
    for _ in 0..chunks {
        let mut s = 0.0;
        for _ in 0..hc {
            let e = standard_normal(&mut rng);
            step_sq += e * e;
            step_mean += e;
            s += e;
        }
        sums.push(s);
    }
    step_mean /= total as f64;
    let step_var = step_sq / total as f64 - step_mean * step_mean;
    let sum_mean = sums.iter().sum::<f64>() / chunks as f64;
    let sum_var =
        sums.iter().map(|s| (s - sum_mean) * (s - sum_mean)).sum::<f64>() / chunks as f64;
    sum_var / step_var
}

/// A pair of similar smooth signals for alignment accuracy tests: a slow
/// random Fourier series and a slightly perturbed, slightly shifted copy.
pub fn smooth_pair(len: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let harmonics: Vec<(f64, f64, f64)> = (1..=4)
        .map(|h| {
            (
                h as f64,
                rng.gen_range(0.2..1.0) / h as f64,
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let eval = |x: f64| -> f64 {
        harmonics
            .iter()
            .map(|(h, a, p)| a * (std::f64::consts::TAU * h * x + p).sin())
            .sum()
    };
    let shift = rng.gen_range(-0.02..0.02);
    let wobble = rng.gen_range(0.0..0.05);
    let a: Vec<f64> = (0..len).map(|i| eval(i as f64 / len as f64)).collect();
    let b: Vec<f64> = (0..len)
        .map(|i| {
            let x = i as f64 / len as f64;
            eval(x + shift) + wobble * (std::f64::consts::TAU * 2.0 * x).cos()
        })
        .collect();
    (a, b)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn naive_dtw_hand_table() {
        let (cost, path) = naive_dtw(&[0.0, 1.0, 2.0], &[0.0, 2.0]);
        assert_eq!(cost, 1.0);
        assert_eq!(path, vec![(0, 0), (1, 0), (2, 1)]);
    }

    #[test]
    fn chunk_ratio_concentrates_near_hc() {
        let ratio = chunk_variance_ratio(16, 100_000, 7);
        assert!((ratio - 16.0).abs() / 16.0 < 0.05, "ratio {ratio}");
    }

    #[test]
    fn peak_speed_constant() {
        assert_abs_diff_eq!(min_jerk_peak_speed(1.0, 1.0), 1.875, epsilon = 1e-9);
    }
}
