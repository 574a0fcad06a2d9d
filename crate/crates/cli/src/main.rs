//! Batch CLI for trajectory smoothness scoring and dataset curation.
//!
//! The scores table (CSV) is the interchange artifact: `score` produces it,
//! and `rank`, `filter`, `weight`, `rerank`, and `report` consume it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use trajscore::curation::{self, Candidate, Metric};
use trajscore::io;
use trajscore::pipeline::{self, PipelineConfig};
use trajscore::synth;
use trajscore::SpeedSource;

#[derive(Parser)]
#[command(name = "trajscore", version, about = "Trajectory smoothness scoring and curation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Sal,
    Ted,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::Sal => Metric::Sal,
            MetricArg::Ted => Metric::Ted,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricChoice {
    Sal,
    Ted,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpeedSourceArg {
    Recorded,
    Differenced,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Zscore,
    Rank,
}

#[derive(Subcommand)]
enum Command {
    /// Score demonstrations with SAL and/or TED.
    Score {
        /// Demonstration file or directory of .jsonl files.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricChoice::Both)]
        metric: MetricChoice,
        /// Override the sampling interval declared in the files.
        #[arg(long)]
        dt_override: Option<f64>,
        #[arg(long, value_enum)]
        speed_source: Option<SpeedSourceArg>,
        #[arg(long)]
        out: PathBuf,
        /// Flat key-value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Order a scores table by one metric (smoothest first).
    Rank {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep the top K ids of a ranked table.
    Filter {
        #[arg(long)]
        ranked: PathBuf,
        #[arg(long)]
        top_k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Normalize badness and attach calibrated soft weights.
    Weight {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, value_enum)]
        normalization: Option<NormalizationArg>,
        /// Target weight ratio between the 90th and 10th badness percentiles.
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-rank retrieval candidates by smoothness, keeping K of the top R.
    Rerank {
        /// CSV with candidate_id,query_id,similarity columns.
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long = "R", default_value_t = 400)]
        r: usize,
        #[arg(long = "K", default_value_t = 200)]
        k: usize,
        #[arg(long, value_enum, default_value_t = MetricArg::Ted)]
        metric: MetricArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the conditional action variance of a demonstration set.
    Diag {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        knn: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a labeled synthetic dataset.
    Synth {
        /// TOML spec: base geometry plus [[levels]] quality profiles.
        #[arg(long)]
        config: PathBuf,
        /// Trajectories per quality level.
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit per-group summaries and plot-ready per-demo artifacts.
    Report {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value = "domain")]
        group_by: String,
        #[arg(long)]
        out: PathBuf,
        /// Demonstrations to recompute spectra and residual series from.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Re-derive the oracle reference values and verify the library.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory to write oracles.json into.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(PipelineConfig::default()),
    }
}

/// Loads demonstrations, reporting per-file errors on stderr. Returns the
/// trajectories and the number of errors.
fn load_inputs(input: &Path, dt_override: Option<f64>) -> Result<(Vec<trajscore::Trajectory>, usize)> {
    let mut outcome = io::load_demonstrations(input)
        .with_context(|| format!("loading demonstrations from {}", input.display()))?;
    for issue in &outcome.errors {
        eprintln!("error: {}: {}", issue.file.display(), issue.error);
    }
    if let Some(dt) = dt_override {
        for traj in &mut outcome.trajectories {
            traj.dt = dt;
        }
    }
    Ok((outcome.trajectories, outcome.errors.len()))
}

fn run() -> Result<usize> {
    let cli = Cli::parse();
    match cli.command {
        Command::Score {
            input,
            metric,
            dt_override,
            speed_source,
            out,
            config,
            workers,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(source) = speed_source {
                cfg.sal.speed_source = match source {
                    SpeedSourceArg::Recorded => SpeedSource::Recorded,
                    SpeedSourceArg::Differenced => SpeedSource::Differenced,
                };
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let (trajectories, load_errors) = load_inputs(&input, dt_override)?;
            if trajectories.is_empty() {
                bail!("no loadable demonstrations in {}", input.display());
            }
            let (mut records, failures) = pipeline::score_all(&trajectories, &cfg)?;
            for failure in &failures {
                eprintln!("error: scoring `{}`: {}", failure.id, failure.error);
            }
            for record in &mut records {
                match metric {
                    MetricChoice::Sal => record.ted = None,
                    MetricChoice::Ted => record.sal = None,
                    MetricChoice::Both => {}
                }
            }
            io::write_scores(&records, &out)?;
            println!("scored {} demonstrations -> {}", records.len(), out.display());
            Ok(load_errors + failures.len())
        }
        Command::Rank { scores, metric, out } => {
            let records = io::read_scores(&scores)?;
            let metric = Metric::from(metric);
            let ranked = curation::rank(&records, metric, metric.better_first())?;
            io::write_scores(&ranked, &out)?;
            println!("ranked {} records by {metric} -> {}", ranked.len(), out.display());
            Ok(0)
        }
        Command::Filter { ranked, top_k, out } => {
            let records = io::read_scores(&ranked)?;
            let ids = curation::select_top_k(&records, top_k)?;
            io::write_id_list(&ids, &out)?;
            println!("kept {} ids -> {}", ids.len(), out.display());
            Ok(0)
        }
        Command::Weight {
            scores,
            normalization,
            ratio,
            metric,
            out,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let mut weight_cfg = cfg.weight;
            if let Some(n) = normalization {
                weight_cfg.normalization = match n {
                    NormalizationArg::Zscore => curation::Normalization::Zscore,
                    NormalizationArg::Rank => curation::Normalization::Rank,
                };
            }
            if let Some(r) = ratio {
                weight_cfg.ratio = r;
            }
            if let Some(m) = metric {
                weight_cfg.metric = m.into();
            }
            weight_cfg.validate()?;
            let records = io::read_scores(&scores)?;
            let mut normalized =
                curation::normalize_scores(&records, weight_cfg.normalization, weight_cfg.metric)?;
            let badness: Vec<f64> = normalized.iter().filter_map(|r| r.badness).collect();
            let lambda = curation::calibrate_lambda(&badness, weight_cfg.ratio)?;
            let weights = curation::soft_weights(&badness, lambda)?;
            for (record, weight) in normalized.iter_mut().zip(weights) {
                record.weight = Some(weight);
            }
            io::write_scores(&normalized, &out)?;
            println!(
                "weighted {} records (lambda = {}) -> {}",
                normalized.len(),
                io::fmt_sig(lambda, 9),
                out.display()
            );
            Ok(0)
        }
        Command::Rerank {
            candidates,
            scores,
            r,
            k,
            metric,
            out,
        } => {
            let cands: Vec<Candidate> = io::read_candidates(&candidates)?;
            let records = io::read_scores(&scores)?;
            let by_id: BTreeMap<String, trajscore::ScoreRecord> =
                records.into_iter().map(|rec| (rec.id.clone(), rec)).collect();
            let kept = curation::rerank_candidates(&cands, &by_id, metric.into(), r, k)?;
            io::write_id_list(&kept, &out)?;
            println!("retained {} candidates -> {}", kept.len(), out.display());
            Ok(0)
        }
        Command::Diag { input, knn, out } => {
            let (trajectories, load_errors) = load_inputs(&input, None)?;
            if trajectories.is_empty() {
                bail!("no loadable demonstrations in {}", input.display());
            }
            // States: per-arm position and rotation vector. Actions: the
            // per-step velocity (recorded when present, differenced else).
            let mut states = Vec::new();
            let mut actions = Vec::new();
            for traj in &trajectories {
                let t_len = traj.len();
                for t in 0..t_len - 1 {
                    let mut s = Vec::new();
                    let mut a = Vec::new();
                    for arm in &traj.arms {
                        let p = arm.positions[t];
                        let rv = arm.orientations[t].to_rotation_vector().0;
                        s.extend_from_slice(&[p.x, p.y, p.z, rv.x, rv.y, rv.z]);
                        let v = match &arm.velocities {
                            Some(vel) => vel[t],
                            None => (arm.positions[t + 1] - arm.positions[t]) * (1.0 / traj.dt),
                        };
                        a.extend_from_slice(&[v.x, v.y, v.z]);
                    }
                    states.push(s);
                    actions.push(a);
                }
            }
            let data = trajscore::diagnostics::StateActionSet::new(states, actions)?;
            let estimate = trajscore::diagnostics::conditional_action_variance(&data, knn)?;
            let rows = format!(
                "quantity,value\nsamples,{}\nstate_dim,{}\naction_dim,{}\nknn_k,{}\nconditional_action_variance,{}\n",
                data.len(),
                data.state_dim(),
                data.action_dim(),
                knn,
                io::fmt_sig(estimate, 9)
            );
            std::fs::write(&out, rows).with_context(|| format!("writing {}", out.display()))?;
            println!("conditional action variance = {}", io::fmt_sig(estimate, 9));
            Ok(load_errors)
        }
        Command::Synth {
            config,
            count,
            seed,
            out,
        } => {
            let spec = io::load_synth_spec(&config)?;
            let (synth_cfg, levels) = spec.into_parts();
            let trajectories = synth::synth_dataset(&synth_cfg, count, &levels, seed)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for traj in &trajectories {
                io::write_demonstration(traj, &out.join(format!("{}.jsonl", traj.id)))?;
            }
            println!("wrote {} trajectories -> {}", trajectories.len(), out.display());
            Ok(0)
        }
        Command::Report {
            scores,
            group_by,
            out,
            input,
        } => {
            if group_by != "domain" {
                bail!("unsupported group-by key `{group_by}` (only `domain`)");
            }
            let records = io::read_scores(&scores)?;
            let mut details = Vec::new();
            let mut load_errors = 0;
            if let Some(input) = input {
                let cfg = PipelineConfig::default();
                let (trajectories, errors) = load_inputs(&input, None)?;
                load_errors = errors;
                for traj in &trajectories {
                    match pipeline::score_details(traj, &cfg) {
                        Ok(detail) => details.push(detail),
                        Err(e) => {
                            load_errors += 1;
                            eprintln!("error: details for `{}`: {e}", traj.id);
                        }
                    }
                }
            }
            trajscore::report::emit_report(&records, &details, &out)?;
            println!("report -> {}", out.display());
            Ok(load_errors)
        }
        Command::Selfcheck { seed, out } => {
            let checks = pipeline::run_oracles(seed, out.as_deref())?;
            let mut failed = 0;
            for check in &checks {
                let status = if check.pass() { "PASS" } else { "FAIL" };
                if !check.pass() {
                    failed += 1;
                }
                println!(
                    "{status} {}: oracle {} vs library {} (tol {})",
                    check.name,
                    io::fmt_sig(check.oracle, 9),
                    io::fmt_sig(check.library, 9),
                    io::fmt_sig(check.tolerance, 9)
                );
            }
            Ok(failed)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} error(s) collected");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
