//! Plot-ready report emission: per-group score summaries, per-demonstration
//! spectrum samples, and envelope residual series.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::curation::ScoreRecord;
use crate::error::{Error, Result};
use crate::io::fmt_sig;
use crate::spectral::Spectrum;
use crate::stats::{mean, percentile_linear, pop_std};

/// Per-demonstration artifacts for report emission, one entry per arm.
#[derive(Debug, Clone)]
pub struct DemoDetail {
    pub id: String,
    pub spectra: Vec<Spectrum>,
    pub residuals: Vec<Vec<f64>>,
}

fn write_csv(path: &Path, rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .write_record(row)
            .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    }
    let data = writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))?;
    fs::write(path, data).map_err(|e| Error::io(path, e))
}

fn summary_rows(group: &str, metric: &str, values: &[f64]) -> Vec<String> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    vec![
        group.to_string(),
        metric.to_string(),
        values.len().to_string(),
        fmt_sig(mean(values), 9),
        fmt_sig(pop_std(values), 9),
        fmt_sig(percentile_linear(&sorted, 0.25), 9),
        fmt_sig(percentile_linear(&sorted, 0.5), 9),
        fmt_sig(percentile_linear(&sorted, 0.75), 9),
    ]
}

/// Emits `summary.csv` plus per-demonstration `spectra/<id>.csv` and
/// `residuals/<id>.csv` under `out_dir`. Group order is deterministic.
pub fn emit_report(records: &[ScoreRecord], details: &[DemoDetail], out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut groups: BTreeMap<String, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry(r.domain.clone().unwrap_or_else(|| "ungrouped".into()))
            .or_default()
            .push(r);
    }
    let mut rows = vec![vec![
        "group".to_string(),
        "metric".to_string(),
        "count".to_string(),
        "mean".to_string(),
        "std".to_string(),
        "q25".to_string(),
        "median".to_string(),
        "q75".to_string(),
    ]];
    for (name, members) in &groups {
        for (metric, extract) in [
            ("sal", (|r: &&ScoreRecord| r.sal) as fn(&&ScoreRecord) -> Option<f64>),
            ("ted", |r: &&ScoreRecord| r.ted),
        ] {
            let values: Vec<f64> = members.iter().filter_map(extract).collect();
            if !values.is_empty() {
                rows.push(summary_rows(name, metric, &values));
            }
        }
    }
    write_csv(&out_dir.join("summary.csv"), &rows)?;

    if !details.is_empty() {
        let spectra_dir = out_dir.join("spectra");
        let residual_dir = out_dir.join("residuals");
        fs::create_dir_all(&spectra_dir).map_err(|e| Error::io(&spectra_dir, e))?;
        fs::create_dir_all(&residual_dir).map_err(|e| Error::io(&residual_dir, e))?;
        for detail in details {
            if !detail.spectra.is_empty() {
                let mut rows = Vec::new();
                let mut header = vec!["freq".to_string()];
                for a in 0..detail.spectra.len() {
                    header.push(format!("log_amp_arm{a}"));
                }
                rows.push(header);
                let bins = detail.spectra[0].len();
                for k in 0..bins {
                    let mut row = vec![fmt_sig(detail.spectra[0].freqs[k], 9)];
                    for spectrum in &detail.spectra {
                        row.push(fmt_sig(spectrum.log_amps[k], 9));
                    }
                    rows.push(row);
                }
                write_csv(&spectra_dir.join(format!("{}.csv", detail.id)), &rows)?;
            }
            if !detail.residuals.is_empty() {
                let mut rows = Vec::new();
                let mut header = vec!["t".to_string()];
                for a in 0..detail.residuals.len() {
                    header.push(format!("residual_arm{a}"));
                }
                rows.push(header);
                for t in 0..detail.residuals[0].len() {
                    let mut row = vec![t.to_string()];
                    for series in &detail.residuals {
                        row.push(fmt_sig(series[t], 9));
                    }
                    rows.push(row);
                }
                write_csv(&residual_dir.join(format!("{}.csv", detail.id)), &rows)?;
            }
        }
    }
    Ok(())
}
