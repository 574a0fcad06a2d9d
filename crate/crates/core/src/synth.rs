//! Synthetic trajectory generation with known ground-truth quality:
//! minimum-jerk waypoint motion, seeded noise injection, and labeled
//! multi-level datasets for metric validation.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{UnitQuat, Vec3};
use crate::model::{ArmTrack, Trajectory};

/// Kinds of execution-noise artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Seeded zero-mean positional noise band-limited above half-Nyquist.
    HighFreqJitter,
    /// Fixed-frequency sinusoid in a seeded perpendicular direction.
    TremorSinusoid,
    /// Local time rescaling toward near-zero speed over a window.
    HesitationPause,
}

/// One noise-injection instruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Meters for positional kinds; slowdown depth in `[0, 1]` for pauses.
    pub amplitude: f64,
    /// Hz; only meaningful for periodic kinds.
    #[serde(default)]
    pub frequency: f64,
    #[serde(default)]
    pub seed: u64,
}

/// A labeled noise profile applied on top of the base configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityLevel {
    pub label: String,
    #[serde(default)]
    pub noise: Vec<NoiseSpec>,
}

/// Base geometry of a synthetic demonstration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub dt: f64,
    pub waypoints: Vec<Vec3>,
    /// Per-segment durations in seconds; one fewer than waypoints.
    pub durations: Vec<f64>,
    /// Waypoint indices where the gripper state flips.
    #[serde(default)]
    pub contact_toggles: Vec<usize>,
    /// Optional per-waypoint orientations; empty means identity throughout.
    #[serde(default)]
    pub orientation_keyframes: Vec<UnitQuat>,
    /// Noise applied to every generated trajectory before level noise.
    #[serde(default)]
    pub noise: Vec<NoiseSpec>,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::InvalidConfig("need at least 2 waypoints".into()));
        }
        if self.durations.len() != self.waypoints.len() - 1 {
            return Err(Error::InvalidConfig(format!(
                "need {} segment durations, got {}",
                self.waypoints.len() - 1,
                self.durations.len()
            )));
        }
        if self.durations.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::InvalidConfig("durations must be positive".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig("dt must be positive".into()));
        }
        if !self.orientation_keyframes.is_empty()
            && self.orientation_keyframes.len() != self.waypoints.len()
        {
            return Err(Error::InvalidConfig(
                "orientation keyframes must match waypoints".into(),
            ));
        }
        if self
            .contact_toggles
            .iter()
            .any(|&k| k == 0 || k >= self.waypoints.len())
        {
            return Err(Error::InvalidConfig(
                "contact toggles must name interior or final waypoints".into(),
            ));
        }
        Ok(())
    }
}

fn quintic_ease(tau: f64) -> f64 {
    10.0 * tau.powi(3) - 15.0 * tau.powi(4) + 6.0 * tau.powi(5)
}

/// Minimum-jerk point-to-point segment sampled at `dt`.
///
/// The sample count is `round(duration / dt) + 1`, so both endpoints are hit
/// exactly and endpoint velocity and acceleration vanish.
pub fn min_jerk_segment(x0: Vec3, xf: Vec3, duration: f64, dt: f64) -> Result<Vec<Vec3>> {
    if !(dt > 0.0) {
        return Err(Error::DomainError(format!("dt must be positive, got {dt}")));
    }
    if duration < 2.0 * dt {
        return Err(Error::SegmentTooShort { duration, dt });
    }
    let n = (duration / dt).round() as usize + 1;
    Ok((0..n)
        .map(|i| {
            let tau = i as f64 / (n - 1) as f64;
            let s = quintic_ease(tau);
            // Convex combination keeps both endpoints exact.
            x0 * (1.0 - s) + xf * s
        })
        .collect())
}

/// Zero-mean noise with spectral support restricted to `[min_freq_hz, f_N]`,
/// scaled to the requested time-domain RMS. Deterministic in `seed`.
pub fn band_limited_noise(
    len: usize,
    dt: f64,
    min_freq_hz: f64,
    rms: f64,
    seed: u64,
) -> Vec<f64> {
    if len < 4 || rms == 0.0 {
        return vec![0.0; len];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex::new(0.0, 0.0); len];
    let bin_hz = 1.0 / (len as f64 * dt);
    let half = len / 2;
    for k in 1..=half {
        if k as f64 * bin_hz < min_freq_hz {
            continue;
        }
        let magnitude = rng.gen_range(0.5..1.5);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let value = Complex::from_polar(magnitude, phase);
        if k == len - k {
            // Nyquist bin of an even-length transform must stay real.
            spectrum[k] = Complex::new(value.re, 0.0);
        } else {
            spectrum[k] = value;
            spectrum[len - k] = value.conj();
        }
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut spectrum);
    let mut noise: Vec<f64> = spectrum.iter().map(|c| c.re / len as f64).collect();
    let mean = noise.iter().sum::<f64>() / len as f64;
    for v in &mut noise {
        *v -= mean;
    }
    let actual = (noise.iter().map(|v| v * v).sum::<f64>() / len as f64).sqrt();
    if actual > 0.0 {
        let scale = rms / actual;
        for v in &mut noise {
            *v *= scale;
        }
    }
    noise
}

fn lerp_sample(positions: &[Vec3], u: f64) -> Vec3 {
    let lo = u.floor() as usize;
    if lo + 1 >= positions.len() {
        return positions[positions.len() - 1];
    }
    positions[lo].lerp(positions[lo + 1], u - lo as f64)
}

fn slerp_sample(quats: &[UnitQuat], u: f64) -> UnitQuat {
    let lo = u.floor() as usize;
    if lo + 1 >= quats.len() {
        return quats[quats.len() - 1];
    }
    quats[lo].slerp(quats[lo + 1], u - lo as f64)
}

/// Applies one noise instruction to an arm track. Amplitude zero is the
/// identity. Recorded velocities are dropped when the track is perturbed.
pub fn inject_noise(arm: &ArmTrack, dt: f64, spec: &NoiseSpec) -> Result<ArmTrack> {
    if spec.amplitude < 0.0 || !spec.amplitude.is_finite() {
        return Err(Error::DomainError(format!(
            "noise amplitude must be non-negative, got {}",
            spec.amplitude
        )));
    }
    if spec.amplitude == 0.0 {
        return Ok(arm.clone());
    }
    let t = arm.len();
    let nyquist = 0.5 / dt;
    let mut out = arm.clone();
    out.velocities = None;
    match spec.kind {
        NoiseKind::HighFreqJitter => {
            for dim in 0..3 {
                let noise = band_limited_noise(
                    t,
                    dt,
                    0.5 * nyquist,
                    spec.amplitude,
                    spec.seed.wrapping_add(dim as u64 + 1),
                );
                for (p, n) in out.positions.iter_mut().zip(&noise) {
                    match dim {
                        0 => p.x += n,
                        1 => p.y += n,
                        _ => p.z += n,
                    }
                }
            }
        }
        NoiseKind::TremorSinusoid => {
            if !(spec.frequency > 0.0) {
                return Err(Error::DomainError(
                    "tremor frequency must be positive".into(),
                ));
            }
            if spec.frequency > nyquist {
                return Err(Error::DomainError(format!(
                    "tremor frequency {} Hz exceeds Nyquist {} Hz",
                    spec.frequency, nyquist
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let travel = arm.positions[t - 1] - arm.positions[0];
            let axis = travel
                .normalized()
                .unwrap_or(Vec3::new(1.0, 0.0, 0.0));
            let spin = UnitQuat::from_axis_angle(
                axis,
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let dir = spin.rotate(axis.any_perpendicular());
            for (i, p) in out.positions.iter_mut().enumerate() {
                let phase = std::f64::consts::TAU * spec.frequency * i as f64 * dt;
                *p += dir * (spec.amplitude * phase.sin());
            }
        }
        NoiseKind::HesitationPause => {
            let depth = spec.amplitude.min(1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let center = rng.gen_range(0.3..0.7) * (t - 1) as f64;
            let halfwidth = 0.1 * t as f64;
            // Cumulative warped time, renormalized to preserve duration.
            let mut warped = Vec::with_capacity(t);
            let mut u = 0.0;
            warped.push(0.0);
            for i in 1..t {
                let x = (i as f64 - center) / halfwidth;
                let factor = if x.abs() < 1.0 {
                    1.0 - depth * 0.5 * (1.0 + (std::f64::consts::PI * x).cos())
                } else {
                    1.0
                };
                u += factor;
                warped.push(u);
            }
            let scale = (t - 1) as f64 / warped[t - 1];
            out.positions = warped
                .iter()
                .map(|&w| lerp_sample(&arm.positions, w * scale))
                .collect();
            out.orientations = warped
                .iter()
                .map(|&w| slerp_sample(&arm.orientations, w * scale))
                .collect();
            out.gripper = warped
                .iter()
                .map(|&w| arm.gripper[((w * scale).round() as usize).min(t - 1)])
                .collect();
        }
    }
    Ok(out)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn mix_seed(parts: &[u64]) -> u64 {
    let mut acc = 0x51_7C_C1_B7_27_22_0A_95u64;
    for &p in parts {
        acc = splitmix(acc ^ p);
    }
    acc
}

/// Builds the clean base arm for a configuration.
fn base_arm(cfg: &SynthConfig) -> Result<ArmTrack> {
    let mut positions: Vec<Vec3> = Vec::new();
    let mut orientations: Vec<UnitQuat> = Vec::new();
    let mut boundaries = vec![0usize];
    let keyframes: Vec<UnitQuat> = if cfg.orientation_keyframes.is_empty() {
        vec![UnitQuat::IDENTITY; cfg.waypoints.len()]
    } else {
        cfg.orientation_keyframes.clone()
    };
    for (i, duration) in cfg.durations.iter().enumerate() {
        let seg = min_jerk_segment(cfg.waypoints[i], cfg.waypoints[i + 1], *duration, cfg.dt)?;
        let n = seg.len();
        let skip = usize::from(i > 0);
        for (j, p) in seg.into_iter().enumerate().skip(skip) {
            let tau = j as f64 / (n - 1) as f64;
            positions.push(p);
            orientations.push(keyframes[i].slerp(keyframes[i + 1], quintic_ease(tau)));
        }
        boundaries.push(positions.len() - 1);
    }
    let gripper: Vec<bool> = (0..positions.len())
        .map(|t| {
            cfg.contact_toggles
                .iter()
                .filter(|&&k| t >= boundaries[k])
                .count()
                % 2
                == 1
        })
        .collect();
    Ok(ArmTrack {
        positions,
        orientations,
        gripper,
        velocities: None,
    })
}

/// Generates `count` trajectories per quality level, deterministically in
/// `seed`. Each trajectory carries its level label and index in metadata
/// (`quality_level`, `noise_level_index`).
pub fn synth_dataset(
    cfg: &SynthConfig,
    count: usize,
    levels: &[QualityLevel],
    seed: u64,
) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    if count < 1 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    if levels.is_empty() {
        return Err(Error::EmptyInput("quality levels"));
    }
    let base = base_arm(cfg)?;
    let mut out = Vec::with_capacity(count * levels.len());
    for (li, level) in levels.iter().enumerate() {
        for j in 0..count {
            let mut arm = base.clone();
            for (si, spec) in cfg.noise.iter().chain(level.noise.iter()).enumerate() {
                let derived = NoiseSpec {
                    seed: mix_seed(&[seed, li as u64, j as u64, si as u64, spec.seed]),
                    ..*spec
                };
                arm = inject_noise(&arm, cfg.dt, &derived)?;
            }
            let mut metadata = BTreeMap::new();
            metadata.insert("quality_level".to_string(), level.label.clone());
            metadata.insert("noise_level_index".to_string(), li.to_string());
            metadata.insert("domain".to_string(), level.label.clone());
            out.push(Trajectory {
                id: format!("synth-{}-{j:03}", level.label),
                dt: cfg.dt,
                arms: vec![arm],
                metadata,
            });
        }
    }
    Ok(out)
}

/// A default three-level dataset configuration used by validation suites:
/// a two-segment pick-like motion with one contact toggle.
pub fn default_validation_config() -> SynthConfig {
    SynthConfig {
        dt: 0.05,
        waypoints: vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.4, 0.2, 0.1),
            Vec3::new(0.7, 0.3, 0.4),
        ],
        durations: vec![2.0, 2.5],
        contact_toggles: vec![1],
        orientation_keyframes: vec![
            UnitQuat::IDENTITY,
            UnitQuat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 0.5),
            UnitQuat::from_axis_angle(Vec3::new(0.0, 1.0, 0.0), 0.8),
        ],
        noise: Vec::new(),
    }
}

/// Clean / mid / noisy jitter levels with the given amplitudes.
pub fn jitter_levels(amplitudes: [f64; 3]) -> Vec<QualityLevel> {
    ["clean", "mid", "noisy"]
        .iter()
        .zip(amplitudes)
        .map(|(label, amplitude)| QualityLevel {
            label: (*label).to_string(),
            noise: if amplitude == 0.0 {
                Vec::new()
            } else {
                vec![NoiseSpec {
                    kind: NoiseKind::HighFreqJitter,
                    amplitude,
                    frequency: 0.0,
                    seed: 0,
                }]
            },
        })
        .collect()
}
