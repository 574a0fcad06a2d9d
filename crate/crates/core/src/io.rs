//! File formats: line-delimited demonstration files, the scores table, and
//! the retrieval-candidate table.
//!
//! A demonstration file is JSON-lines: one header record followed by one
//! record per frame. Scores and candidates are CSV with a mandatory header
//! row; numeric cells use nine significant digits and empty cells encode
//! missing values.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curation::{Candidate, ScoreRecord};
use crate::error::{Error, Result};
use crate::geometry::{UnitQuat, Vec3};
use crate::model::{validate_trajectory, ArmTrack, Trajectory};
use crate::synth::{QualityLevel, SynthConfig};

/// Demonstration-file header line.
#[derive(Debug, Serialize, Deserialize)]
struct HeaderRecord {
    id: String,
    dt: f64,
    arm_count: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

/// Gripper cell: boolean, or a scalar thresholded at 0.5.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum GripperValue {
    Bool(bool),
    Scalar(f64),
}

impl GripperValue {
    fn as_bool(&self) -> bool {
        match self {
            GripperValue::Bool(b) => *b,
            GripperValue::Scalar(v) => *v >= 0.5,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameArm {
    pos: [f64; 3],
    quat: [f64; 4],
    gripper: GripperValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vel: Option<[f64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameRecord {
    t: usize,
    arms: Vec<FrameArm>,
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads one demonstration file.
pub fn read_demonstration(path: &Path) -> Result<Trajectory> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (_, header_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let header_line = header_line.map_err(|e| Error::io(path, e))?;
    let header: HeaderRecord = serde_json::from_str(&header_line)
        .map_err(|e| parse_err(path, 1, format!("bad header: {e}")))?;
    if header.arm_count == 0 {
        return Err(parse_err(path, 1, "arm_count must be positive"));
    }

    let mut arms: Vec<ArmTrack> = (0..header.arm_count)
        .map(|_| ArmTrack {
            positions: Vec::new(),
            orientations: Vec::new(),
            gripper: Vec::new(),
            velocities: None,
        })
        .collect();
    let mut any_velocity = vec![false; header.arm_count];
    let mut velocities: Vec<Vec<Vec3>> = vec![Vec::new(); header.arm_count];
    let mut expected_t = 0usize;

    for (index, line) in lines {
        let line_no = index + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let frame: FrameRecord = serde_json::from_str(&line)
            .map_err(|e| parse_err(path, line_no, format!("bad frame: {e}")))?;
        if frame.t != expected_t {
            return Err(parse_err(
                path,
                line_no,
                format!("frame index {} out of order, expected {}", frame.t, expected_t),
            ));
        }
        if frame.arms.len() != header.arm_count {
            return Err(parse_err(
                path,
                line_no,
                format!(
                    "frame has {} arms, header declares {}",
                    frame.arms.len(),
                    header.arm_count
                ),
            ));
        }
        for (a, frame_arm) in frame.arms.into_iter().enumerate() {
            let quat = UnitQuat::new(
                frame_arm.quat[0],
                frame_arm.quat[1],
                frame_arm.quat[2],
                frame_arm.quat[3],
            )
            .map_err(|e| parse_err(path, line_no, format!("arm {a}: {e}")))?;
            arms[a].positions.push(Vec3::from(frame_arm.pos));
            arms[a].orientations.push(quat);
            arms[a].gripper.push(frame_arm.gripper.as_bool());
            if let Some(v) = frame_arm.vel {
                any_velocity[a] = true;
                velocities[a].resize(arms[a].positions.len() - 1, Vec3::ZERO);
                velocities[a].push(Vec3::from(v));
            }
        }
        expected_t += 1;
    }

    for (a, arm) in arms.iter_mut().enumerate() {
        if any_velocity[a] {
            velocities[a].resize(arm.positions.len(), Vec3::ZERO);
            arm.velocities = Some(std::mem::take(&mut velocities[a]));
        }
    }
    let traj = Trajectory {
        id: header.id,
        dt: header.dt,
        arms,
        metadata: header.metadata,
    };
    let report = validate_trajectory(&traj);
    if !report.is_valid() {
        return Err(Error::Validation {
            id: traj.id,
            report: report.to_string(),
        });
    }
    Ok(traj)
}

/// Writes one demonstration file.
pub fn write_demonstration(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    let header = HeaderRecord {
        id: traj.id.clone(),
        dt: traj.dt,
        arm_count: traj.arms.len(),
        metadata: traj.metadata.clone(),
    };
    let mut line = serde_json::to_string(&header)
        .map_err(|e| Error::InvalidInput(format!("header serialization failed: {e}")))?;
    line.push('\n');
    out.extend_from_slice(line.as_bytes());
    for t in 0..traj.len() {
        let frame = FrameRecord {
            t,
            arms: traj
                .arms
                .iter()
                .map(|arm| FrameArm {
                    pos: arm.positions[t].into(),
                    quat: arm.orientations[t].into(),
                    gripper: GripperValue::Scalar(if arm.gripper[t] { 1.0 } else { 0.0 }),
                    vel: arm.velocities.as_ref().map(|v| v[t].into()),
                })
                .collect(),
        };
        let mut line = serde_json::to_string(&frame)
            .map_err(|e| Error::InvalidInput(format!("frame serialization failed: {e}")))?;
        line.push('\n');
        out.extend_from_slice(line.as_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// One collected ingestion problem.
#[derive(Debug)]
pub struct LoadIssue {
    pub file: PathBuf,
    pub error: Error,
}

/// Result of loading a file or directory: parsed trajectories plus every
/// per-file failure, so partial success is visible rather than silent.
#[derive(Debug, Default)]
pub struct LoadOutcome {
    pub trajectories: Vec<Trajectory>,
    pub errors: Vec<LoadIssue>,
}

/// Loads a demonstration file, or every `*.jsonl` file in a directory.
/// Trajectories are returned ordered by id.
pub fn load_demonstrations(path: &Path) -> Result<LoadOutcome> {
    let mut files = Vec::new();
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_dir() {
        for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            let p = entry.path();
            if p.extension().is_some_and(|e| e == "jsonl") {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut outcome = LoadOutcome::default();
    for file in files {
        match read_demonstration(&file) {
            Ok(traj) => outcome.trajectories.push(traj),
            Err(error) => outcome.errors.push(LoadIssue { file, error }),
        }
    }
    outcome.trajectories.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(outcome)
}

/// Formats with `sig` significant digits, shortest equivalent form.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponential format");
    let exponent: i32 = exponent.parse().expect("numeric exponent");
    if exponent >= -4 && (exponent as i64) < sig as i64 {
        let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exponent)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

const SCORE_HEADER: [&str; 8] = [
    "id", "domain", "sal", "ted", "rank_sal", "rank_ted", "badness", "weight",
];

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| fmt_sig(x, 9)).unwrap_or_default()
}

fn opt_rank(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the scores table. Ids must be unique; missing values are empty
/// cells.
pub fn write_scores(records: &[ScoreRecord], path: &Path) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for r in records {
        if !seen.insert(&r.id) {
            return Err(Error::InvalidInput(format!("duplicate id `{}`", r.id)));
        }
    }
    let data = scores_to_csv(records)?;
    fs::write(path, data).map_err(|e| Error::io(path, e))
}

/// Serializes the scores table to CSV bytes; used for deterministic
/// comparisons as well as file output.
pub fn scores_to_csv(records: &[ScoreRecord]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(SCORE_HEADER)
        .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    for r in records {
        writer
            .write_record([
                r.id.as_str(),
                r.domain.as_deref().unwrap_or(""),
                &opt_num(r.sal),
                &opt_num(r.ted),
                &opt_rank(r.rank_sal),
                &opt_rank(r.rank_ted),
                &opt_num(r.badness),
                &opt_num(r.weight),
            ])
            .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))
}

fn parse_opt_num(path: &Path, line: usize, field: &str, cell: &str) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    let v: f64 = cell
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad {field} value `{cell}`")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite {field}")));
    }
    Ok(Some(v))
}

fn parse_opt_rank(path: &Path, line: usize, field: &str, cell: &str) -> Result<Option<usize>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse()
        .map(Some)
        .map_err(|_| parse_err(path, line, format!("bad {field} value `{cell}`")))
}

/// Reads a scores table written by [`write_scores`].
pub fn read_scores(path: &Path) -> Result<Vec<ScoreRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    if headers.iter().ne(SCORE_HEADER) {
        return Err(parse_err(path, 1, "unexpected scores header"));
    }
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| parse_err(path, line, e.to_string()))?;
        if row.len() != SCORE_HEADER.len() {
            return Err(parse_err(path, line, "wrong column count"));
        }
        let id = row[0].to_string();
        if id.is_empty() {
            return Err(parse_err(path, line, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(parse_err(path, line, format!("duplicate id `{id}`")));
        }
        out.push(ScoreRecord {
            id,
            domain: (!row[1].is_empty()).then(|| row[1].to_string()),
            sal: parse_opt_num(path, line, "sal", &row[2])?,
            ted: parse_opt_num(path, line, "ted", &row[3])?,
            rank_sal: parse_opt_rank(path, line, "rank_sal", &row[4])?,
            rank_ted: parse_opt_rank(path, line, "rank_ted", &row[5])?,
            badness: parse_opt_num(path, line, "badness", &row[6])?,
            weight: parse_opt_num(path, line, "weight", &row[7])?,
        });
    }
    Ok(out)
}

/// Reads a retrieval-candidate table: `candidate_id,query_id,similarity`.
pub fn read_candidates(path: &Path) -> Result<Vec<Candidate>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let expected = ["candidate_id", "query_id", "similarity"];
    if headers.iter().ne(expected) {
        return Err(parse_err(path, 1, "unexpected candidates header"));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| parse_err(path, line, e.to_string()))?;
        let similarity: f64 = row[2]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad similarity `{}`", &row[2])))?;
        out.push(Candidate {
            id: row[0].to_string(),
            query: row[1].to_string(),
            similarity,
        });
    }
    Ok(out)
}

/// Writes a candidate table; the inverse of [`read_candidates`].
pub fn write_candidates(candidates: &[Candidate], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["candidate_id", "query_id", "similarity"])
        .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    for c in candidates {
        writer
            .write_record([c.id.as_str(), c.query.as_str(), &fmt_sig(c.similarity, 9)])
            .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    }
    let data = writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))?;
    fs::write(path, data).map_err(|e| Error::io(path, e))
}

/// Writes one id per line.
pub fn write_id_list(ids: &[String], path: &Path) -> Result<()> {
    let mut out = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    for id in ids {
        writeln!(out, "{id}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Synthetic-dataset file spec: base geometry plus labeled quality levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthFileSpec {
    pub dt: f64,
    pub waypoints: Vec<Vec3>,
    pub durations: Vec<f64>,
    #[serde(default)]
    pub contact_toggles: Vec<usize>,
    #[serde(default)]
    pub orientation_keyframes: Vec<UnitQuat>,
    #[serde(default)]
    pub noise: Vec<crate::synth::NoiseSpec>,
    #[serde(default)]
    pub levels: Vec<QualityLevel>,
}

impl SynthFileSpec {
    pub fn into_parts(self) -> (SynthConfig, Vec<QualityLevel>) {
        let levels = if self.levels.is_empty() {
            vec![QualityLevel {
                label: "default".into(),
                noise: Vec::new(),
            }]
        } else {
            self.levels
        };
        (
            SynthConfig {
                dt: self.dt,
                waypoints: self.waypoints,
                durations: self.durations,
                contact_toggles: self.contact_toggles,
                orientation_keyframes: self.orientation_keyframes,
                noise: self.noise,
            },
            levels,
        )
    }
}

/// Parses a synthetic-dataset spec from TOML text.
pub fn parse_synth_spec(text: &str) -> Result<SynthFileSpec> {
    toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("synth spec: {e}")))
}

/// Loads a synthetic-dataset spec file.
pub fn load_synth_spec(path: &Path) -> Result<SynthFileSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_synth_spec(&text)
}

#[cfg(test)]
mod tests {
    use tempfile::tempdir;

    use super::*;
    use crate::synth;

    fn sample_trajectory() -> Trajectory {
        let cfg = synth::default_validation_config();
        let levels = synth::jitter_levels([0.0, 0.01, 0.05]);
        synth::synth_dataset(&cfg, 1, &levels, 7).unwrap().remove(1)
    }

    #[test]
    fn fmt_sig_examples() {
        assert_eq!(fmt_sig(-10.0, 9), "-10");
        assert_eq!(fmt_sig(0.0, 9), "0");
        assert_eq!(fmt_sig(2.878231366, 9), "2.87823137");
        assert_eq!(fmt_sig(1e-7, 9), "1e-7");
        assert_eq!(fmt_sig(123456789012.3, 9), "1.23456789e11");
        assert_eq!(fmt_sig(0.05, 9), "0.05");
    }

    #[test]
    fn fmt_sig_round_trips_stably() {
        for &x in &[
            -10.0,
            0.123456789,
            3.5e-11,
            -9.999999999e8,
            std::f64::consts::PI,
        ] {
            let s1 = fmt_sig(x, 9);
            let parsed: f64 = s1.parse().unwrap();
            assert_eq!(fmt_sig(parsed, 9), s1, "unstable for {x}");
        }
    }

    #[test]
    fn demonstration_round_trip_is_exact() {
        let dir = tempdir().unwrap();
        let traj = sample_trajectory();
        let path = dir.path().join("demo.jsonl");
        write_demonstration(&traj, &path).unwrap();
        let back = read_demonstration(&path).unwrap();
        assert_eq!(traj, back);
        // Second generation must be byte-identical.
        let path2 = dir.path().join("demo2.jsonl");
        write_demonstration(&back, &path2).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn two_frame_file_parses() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("tiny.jsonl");
        fs::write(
            &path,
            concat!(
                "{\"id\":\"tiny\",\"dt\":0.05,\"arm_count\":1}\n",
                "{\"t\":0,\"arms\":[{\"pos\":[0,0,0],\"quat\":[1,0,0,0],\"gripper\":0}]}\n",
                "{\"t\":1,\"arms\":[{\"pos\":[0.1,0,0],\"quat\":[1,0,0,0],\"gripper\":0.9}]}\n",
            ),
        )
        .unwrap();
        let traj = read_demonstration(&path).unwrap();
        assert_eq!(traj.len(), 2);
        assert!(!traj.arms[0].gripper[0]);
        assert!(traj.arms[0].gripper[1], "0.9 thresholds to contact");
    }

    #[test]
    fn malformed_frame_names_the_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        fs::write(
            &path,
            concat!(
                "{\"id\":\"bad\",\"dt\":0.05,\"arm_count\":1}\n",
                "{\"t\":0,\"arms\":[{\"pos\":[0,0],\"quat\":[1,0,0,0],\"gripper\":0}]}\n",
            ),
        )
        .unwrap();
        match read_demonstration(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn directory_load_collects_errors() {
        let dir = tempdir().unwrap();
        for (i, traj) in [sample_trajectory(), {
            let mut t = sample_trajectory();
            t.id = "zother".into();
            t
        }]
        .iter()
        .enumerate()
        {
            write_demonstration(traj, &dir.path().join(format!("d{i}.jsonl"))).unwrap();
        }
        fs::write(dir.path().join("broken.jsonl"), "not json\n").unwrap();
        let outcome = load_demonstrations(dir.path()).unwrap();
        assert_eq!(outcome.trajectories.len(), 2);
        assert_eq!(outcome.errors.len(), 1);
        // Ordered by id.
        assert!(outcome.trajectories[0].id < outcome.trajectories[1].id);
    }

    #[test]
    fn scores_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let records: Vec<ScoreRecord> = (0..10)
            .map(|i| ScoreRecord {
                id: format!("demo-{i:02}"),
                domain: (i % 2 == 0).then(|| "lab".to_string()),
                sal: Some(-3.0 - 0.123456789 * i as f64),
                ted: Some(0.01 * i as f64),
                rank_sal: Some(i + 1),
                rank_ted: None,
                badness: (i > 0).then(|| i as f64 / 9.0),
                weight: None,
            })
            .collect();
        write_scores(&records, &path).unwrap();
        let back = read_scores(&path).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.domain, b.domain);
            assert_eq!(a.rank_sal, b.rank_sal);
            assert_eq!(a.weight, b.weight);
            // Numeric fields survive at nine significant digits.
            assert_eq!(opt_num(a.sal), opt_num(b.sal));
            assert_eq!(opt_num(a.ted), opt_num(b.ted));
            assert_eq!(opt_num(a.badness), opt_num(b.badness));
        }
        // Write-read-write is byte stable.
        let path2 = dir.path().join("scores2.csv");
        write_scores(&back, &path2).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn empty_record_list_gives_header_only() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_scores(&[], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(read_scores(&path).unwrap().is_empty());
    }

    #[test]
    fn missing_weight_stays_missing() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("w.csv");
        let records = vec![
            ScoreRecord {
                id: "a".into(),
                sal: Some(-1.0),
                ..ScoreRecord::default()
            },
            ScoreRecord {
                id: "b".into(),
                sal: Some(-2.0),
                weight: Some(0.25),
                ..ScoreRecord::default()
            },
        ];
        write_scores(&records, &path).unwrap();
        let back = read_scores(&path).unwrap();
        assert_eq!(back[0].weight, None);
        assert_eq!(back[1].weight, Some(0.25));
    }

    #[test]
    fn synth_spec_parses_from_toml() {
        let text = r#"
dt = 0.05
waypoints = [[0.0, 0.0, 0.0], [0.4, 0.2, 0.1]]
durations = [2.0]
contact_toggles = [1]

[[levels]]
label = "clean"

[[levels]]
label = "noisy"

[[levels.noise]]
kind = "high_freq_jitter"
amplitude = 0.05
"#;
        let spec = parse_synth_spec(text).unwrap();
        let (cfg, levels) = spec.into_parts();
        cfg.validate().unwrap();
        assert_eq!(levels.len(), 2);
        assert_eq!(levels[1].noise.len(), 1);
    }
}
