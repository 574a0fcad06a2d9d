//! End-to-end scoring pipeline and the oracle self-check runner.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::ted;
use crate::curation::{Metric, Normalization, ScoreRecord, WeightConfig};
use crate::envelope::{build_reference, TedConfig};
use crate::error::{Error, Result};
use crate::model::{speed_signal_from, SpeedSource, Trajectory};
use crate::report::DemoDetail;
use crate::spectral::{one_sided_spectrum, sal_for_trajectory, SalConfig};

/// Full pipeline configuration: metric settings, weighting, parallelism.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub sal: SalConfig,
    pub ted: TedConfig,
    pub weight: WeightConfig,
    pub workers: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            sal: SalConfig::default(),
            ted: TedConfig::default(),
            weight: WeightConfig::default(),
            workers: 1,
            seed: 0,
        }
    }
}

/// Flat key-value view of the configuration file; every field optional,
/// unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatConfig {
    epsilon: Option<f64>,
    speed_source: Option<SpeedSource>,
    r: Option<f64>,
    eps_dense: Option<f64>,
    eps_sparse: Option<f64>,
    k0_dense: Option<usize>,
    k0_sparse: Option<usize>,
    m_ref: Option<usize>,
    area_budget: Option<f64>,
    eps_num: Option<f64>,
    karcher_halfwidth: Option<usize>,
    w_ori: Option<f64>,
    boundary_blend: Option<f64>,
    dtw_radius: Option<usize>,
    normalization: Option<Normalization>,
    ratio: Option<f64>,
    metric: Option<Metric>,
    workers: Option<usize>,
    seed: Option<u64>,
}

impl PipelineConfig {
    /// Parses a flat key-value configuration, overlaying the defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let flat: FlatConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut cfg = PipelineConfig::default();
        macro_rules! apply {
            ($($field:ident => $slot:expr),+ $(,)?) => {
                $(if let Some(v) = flat.$field { $slot = v; })+
            };
        }
        apply!(
            epsilon => cfg.sal.epsilon,
            speed_source => cfg.sal.speed_source,
            r => cfg.ted.r,
            eps_dense => cfg.ted.eps_dense,
            eps_sparse => cfg.ted.eps_sparse,
            k0_dense => cfg.ted.k0_dense,
            k0_sparse => cfg.ted.k0_sparse,
            m_ref => cfg.ted.m_ref,
            eps_num => cfg.ted.eps_num,
            karcher_halfwidth => cfg.ted.karcher_halfwidth,
            w_ori => cfg.ted.w_ori,
            boundary_blend => cfg.ted.boundary_blend,
            dtw_radius => cfg.ted.dtw_radius,
            normalization => cfg.weight.normalization,
            ratio => cfg.weight.ratio,
            metric => cfg.weight.metric,
            workers => cfg.workers,
            seed => cfg.seed,
        );
        if flat.area_budget.is_some() {
            cfg.ted.area_budget = flat.area_budget;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.ted.validate()?;
        self.weight.validate()?;
        if !(self.sal.epsilon > 0.0) {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// A trajectory whose scoring failed, with the cause.
#[derive(Debug)]
pub struct ScoreFailure {
    pub id: String,
    pub error: Error,
}

/// Scores one trajectory with both metrics.
pub fn score_one(traj: &Trajectory, cfg: &PipelineConfig) -> Result<ScoreRecord> {
    let sal = sal_for_trajectory(traj, &cfg.sal)?;
    let ted_score = ted(traj, &cfg.ted)?;
    Ok(ScoreRecord {
        id: traj.id.clone(),
        domain: traj.metadata.get("domain").cloned(),
        sal: Some(sal),
        ted: Some(ted_score),
        ..ScoreRecord::default()
    })
}

/// Scores a batch. Output order follows input order regardless of the
/// worker count; per-trajectory failures are collected, never fatal.
pub fn score_all(
    trajectories: &[Trajectory],
    cfg: &PipelineConfig,
) -> Result<(Vec<ScoreRecord>, Vec<ScoreFailure>)> {
    if trajectories.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let results: Vec<std::result::Result<ScoreRecord, Error>> =
        pool.install(|| trajectories.par_iter().map(|t| score_one(t, cfg)).collect());
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (traj, result) in trajectories.iter().zip(results) {
        match result {
            Ok(record) => records.push(record),
            Err(error) => failures.push(ScoreFailure {
                id: traj.id.clone(),
                error,
            }),
        }
    }
    Ok((records, failures))
}

/// Spectrum and envelope-residual artifacts for one trajectory, per arm.
pub fn score_details(traj: &Trajectory, cfg: &PipelineConfig) -> Result<DemoDetail> {
    let mut spectra = Vec::with_capacity(traj.arms.len());
    let mut residuals = Vec::with_capacity(traj.arms.len());
    for arm in &traj.arms {
        let signal = speed_signal_from(arm, traj.dt, cfg.sal.speed_source)?;
        spectra.push(one_sided_spectrum(&signal, &cfg.sal)?);
        let reference = build_reference(arm, &cfg.ted)?;
        residuals.push(
            arm.positions
                .iter()
                .zip(&reference.positions)
                .map(|(a, b)| a.distance(*b))
                .collect(),
        );
    }
    Ok(DemoDetail {
        id: traj.id.clone(),
        spectra,
        residuals,
    })
}

/// One oracle cross-check: an independent reference value against the
/// library's result.
#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub oracle: f64,
    pub library: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn pass(&self) -> bool {
        (self.oracle - self.library).abs() <= self.tolerance
    }
}

#[derive(Debug, Serialize)]
struct OracleArtifact<'a> {
    version: u32,
    seed: u64,
    checks: &'a [OracleCheck],
}

/// Recomputes the reference values behind the derived test fixtures and
/// compares the library against them. When `out_dir` is given the checks are
/// written to `oracles.json` for inspection and versioning.
pub fn run_oracles(seed: u64, out_dir: Option<&Path>) -> Result<Vec<OracleCheck>> {
    use crate::{alignment, curation, diagnostics, envelope, geometry::Vec3, oracles, synth};

    let mut checks = Vec::new();
    let mut push = |name: &str, oracle: f64, library: f64, tolerance: f64| {
        checks.push(OracleCheck {
            name: name.to_string(),
            oracle,
            library,
            tolerance,
        });
    };

    // Exact alignment on the tiny hand-checkable pair.
    let a = [0.0, 1.0, 2.0];
    let b = [0.0, 2.0];
    let (oracle_cost, oracle_path) = oracles::naive_dtw(&a, &b);
    let lib = alignment::dtw_exact(&a, &b, |x, y| (x - y).abs())?;
    push("dtw_small_cost", oracle_cost, lib.total_cost, 1e-12);
    push(
        "dtw_small_path_len",
        oracle_path.len() as f64,
        lib.len() as f64,
        0.0,
    );

    // Weight calibration on the uniform badness grid.
    let grid: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
    push(
        "lambda_rank_uniform",
        10.0f64.ln() / 0.8,
        curation::calibrate_lambda(&grid, 10.0)?,
        1e-9,
    );

    // Peak speed of a quintic-ease segment.
    let (l, duration, dt) = (1.0, 2.0, 0.002);
    let seg = synth::min_jerk_segment(Vec3::ZERO, Vec3::new(l, 0.0, 0.0), duration, dt)?;
    let lib_peak = seg
        .windows(2)
        .map(|w| (w[1] - w[0]).norm() / dt)
        .fold(0.0, f64::max);
    push(
        "min_jerk_peak_speed",
        oracles::min_jerk_peak_speed(l, duration),
        lib_peak,
        1e-4,
    );

    // Quadratic Bézier midpoint.
    let control = [
        Vec3::ZERO,
        Vec3::new(1.0, 2.0, 0.0),
        Vec3::new(2.0, 0.0, 0.0),
    ];
    let gap = envelope::bezier_eval(&control, 0.5)?
        .distance(oracles::bezier_bernstein(&control, 0.5));
    push("bezier_quadratic_midpoint_gap", 0.0, gap, 1e-12);

    // Chunked noise-floor amplification, Monte-Carlo vs closed form.
    for hc in [8usize, 16] {
        let ratio = oracles::chunk_variance_ratio(hc, 100_000, seed ^ hc as u64);
        let predicted = diagnostics::chunk_noise_floor(hc as u32, 1.0);
        push(
            &format!("chunk_variance_ratio_hc{hc}"),
            predicted,
            ratio,
            0.05 * predicted,
        );
    }

    // Spectral arc length against the direct quadratic-time evaluation.
    let sal_cfg = SalConfig::default();
    let t = 256;
    let sal_dt = 0.05;
    let values: Vec<f64> = (0..t)
        .map(|i| 1.0 + 0.1 * (std::f64::consts::TAU * 1.0 * i as f64 * sal_dt).sin())
        .collect();
    let signal = crate::model::SpeedSignal::new(values.clone(), sal_dt)?;
    push(
        "sal_sinusoid_direct",
        oracles::sal_direct(&values, sal_dt, sal_cfg.epsilon),
        crate::spectral::sal(&signal, &sal_cfg)?,
        1e-9,
    );

    // Common-axis geodesic mean.
    let axis = Vec3::new(0.0, 0.0, 1.0);
    let quats: Vec<_> = [10.0f64, 20.0, 30.0]
        .iter()
        .map(|d| crate::geometry::UnitQuat::from_axis_angle(axis, d.to_radians()))
        .collect();
    let mean = envelope::karcher_mean(&quats)?;
    push(
        "karcher_common_axis_angle",
        20.0f64.to_radians(),
        crate::geometry::UnitQuat::IDENTITY.geodesic_angle(mean),
        1e-9,
    );

    // Greedy fit: a bump inserts its own index first.
    let mut bump: Vec<Vec3> = (0..11).map(|i| Vec3::new(0.1 * i as f64, 0.0, 0.0)).collect();
    bump[5].y = 0.3;
    let env = envelope::greedy_envelope(&bump, 0.05, &TedConfig::default(), &[0, 10])?;
    push(
        "greedy_bump_first_insertion",
        5.0,
        env.fit.insertions.first().map(|&i| i as f64).unwrap_or(-1.0),
        0.0,
    );

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("oracles.json");
        let artifact = OracleArtifact {
            version: 1,
            seed,
            checks: &checks,
        };
        let json = serde_json::to_string_pretty(&artifact)
            .map_err(|e| Error::InvalidInput(format!("oracle serialization: {e}")))?;
        std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    }
    Ok(checks)
}
