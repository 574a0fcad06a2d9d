//! Spectral arc length (SAL): smoothness of a speed signal measured as the
//! negative arc length of its one-sided log-magnitude spectrum.
//!
//! The transform is an unnormalized forward DFT; all bins from DC to the
//! Nyquist bin are kept, with no windowing or pre-filtering. Log-amplitudes
//! use the natural logarithm of `|V_k| + epsilon`. A less-negative score
//! (closer to zero) means a smoother signal: smooth motion concentrates
//! spectral energy at low frequencies, so the log-spectrum curve is short.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    require_valid, speed_signal_from, SpeedSignal, SpeedSource, Trajectory,
};

/// Configuration for the spectral arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SalConfig {
    /// Regularization constant added to spectral magnitudes before the log.
    pub epsilon: f64,
    /// Which speed series feeds the transform.
    pub speed_source: SpeedSource,
}

impl Default for SalConfig {
    fn default() -> Self {
        SalConfig {
            epsilon: 1e-5,
            speed_source: SpeedSource::Recorded,
        }
    }
}

impl SalConfig {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// One-sided spectrum of a speed signal: frequencies `k / (T * dt)` for
/// `k = 0..=floor(T/2)` and log-amplitudes `ln(|V_k| + epsilon)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub log_amps: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }
}

/// Computes the one-sided magnitude spectrum of `signal`.
pub fn one_sided_spectrum(signal: &SpeedSignal, cfg: &SalConfig) -> Result<Spectrum> {
    cfg.validate()?;
    let t = signal.len();
    if t < 4 {
        return Err(Error::SignalTooShort { len: t, min: 4 });
    }
    let mut buf: Vec<Complex<f64>> = signal
        .values()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(t).process(&mut buf);

    let bins = t / 2;
    let scale = 1.0 / (t as f64 * signal.dt());
    let mut freqs = Vec::with_capacity(bins + 1);
    let mut log_amps = Vec::with_capacity(bins + 1);
    for (k, value) in buf.iter().take(bins + 1).enumerate() {
        freqs.push(k as f64 * scale);
        log_amps.push((value.norm() + cfg.epsilon).ln());
    }
    Ok(Spectrum { freqs, log_amps })
}

/// Spectral arc length of a speed signal. Always negative; larger (closer to
/// zero) is smoother.
pub fn sal(signal: &SpeedSignal, cfg: &SalConfig) -> Result<f64> {
    let spectrum = one_sided_spectrum(signal, cfg)?;
    let mut arc = 0.0;
    for k in 1..spectrum.len() {
        let df = spectrum.freqs[k] - spectrum.freqs[k - 1];
        let dl = spectrum.log_amps[k] - spectrum.log_amps[k - 1];
        arc += (df * df + dl * dl).sqrt();
    }
    Ok(-arc)
}

/// Per-arm SAL averaged over all arms of a trajectory.
pub fn sal_for_trajectory(traj: &Trajectory, cfg: &SalConfig) -> Result<f64> {
    require_valid(traj)?;
    let mut total = 0.0;
    for arm in &traj.arms {
        let signal = speed_signal_from(arm, traj.dt, cfg.speed_source)?;
        total += sal(&signal, cfg)?;
    }
    Ok(total / traj.arms.len() as f64)
}
