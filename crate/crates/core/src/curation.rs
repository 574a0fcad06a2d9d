//! Ranking, filtering, normalization, soft weighting, and retrieval
//! re-ranking of scored demonstrations.
//!
//! Sign conventions: `sal` is better when larger (closer to zero), `ted`
//! when smaller. Badness `q` always grows with roughness, so `sal` is
//! negated before normalization and `ted` used as-is.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{mean, percentile_linear, pop_std};

/// Which smoothness metric drives an operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Sal,
    Ted,
}

impl Metric {
    /// Sort direction that puts the smoothest demonstration first.
    pub fn better_first(self) -> Direction {
        match self {
            Metric::Sal => Direction::Descending,
            Metric::Ted => Direction::Ascending,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Sal => write!(f, "sal"),
            Metric::Ted => write!(f, "ted"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sal" => Ok(Metric::Sal),
            "ted" => Ok(Metric::Ted),
            other => Err(Error::InvalidInput(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Ascending,
    Descending,
}

/// Per-demonstration scores and derived curation fields.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreRecord {
    pub id: String,
    pub domain: Option<String>,
    pub sal: Option<f64>,
    pub ted: Option<f64>,
    pub rank_sal: Option<usize>,
    pub rank_ted: Option<usize>,
    /// Normalized badness; larger means rougher.
    pub badness: Option<f64>,
    /// Soft weight `exp(-lambda * badness)`.
    pub weight: Option<f64>,
}

impl ScoreRecord {
    pub fn metric(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Sal => self.sal,
            Metric::Ted => self.ted,
        }
    }

    fn require_metric(&self, metric: Metric) -> Result<f64> {
        self.metric(metric).ok_or_else(|| Error::MissingScore {
            id: self.id.clone(),
            metric: metric.to_string(),
        })
    }
}

/// Normalization mode for badness scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Zscore,
    Rank,
}

impl std::str::FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zscore" => Ok(Normalization::Zscore),
            "rank" => Ok(Normalization::Rank),
            other => Err(Error::InvalidInput(format!(
                "unknown normalization `{other}`"
            ))),
        }
    }
}

/// Weighting configuration: normalization mode, target weight ratio between
/// the 90th and 10th badness percentiles, and the metric used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub normalization: Normalization,
    pub ratio: f64,
    pub metric: Metric,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig {
            normalization: Normalization::Rank,
            ratio: 10.0,
            metric: Metric::Ted,
        }
    }
}

impl WeightConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "weight ratio must exceed 1, got {}",
                self.ratio
            )));
        }
        Ok(())
    }
}

/// Orders records by `metric` in the given direction, breaking ties by id.
/// The per-metric rank field of the output is filled with 1-based positions.
pub fn rank(records: &[ScoreRecord], metric: Metric, direction: Direction) -> Result<Vec<ScoreRecord>> {
    let mut keyed: Vec<(f64, &ScoreRecord)> = Vec::with_capacity(records.len());
    for r in records {
        keyed.push((r.require_metric(metric)?, r));
    }
    keyed.sort_by(|(a, ra), (b, rb)| {
        let ord = match direction {
            Direction::Ascending => a.total_cmp(b),
            Direction::Descending => b.total_cmp(a),
        };
        ord.then_with(|| ra.id.cmp(&rb.id))
    });
    Ok(keyed
        .into_iter()
        .enumerate()
        .map(|(i, (_, r))| {
            let mut rec = r.clone();
            match metric {
                Metric::Sal => rec.rank_sal = Some(i + 1),
                Metric::Ted => rec.rank_ted = Some(i + 1),
            }
            rec
        })
        .collect())
}

/// First `k` ids of a ranking; `k` must lie in `1..=N`.
pub fn select_top_k(ranked: &[ScoreRecord], k: usize) -> Result<Vec<String>> {
    if k == 0 || k > ranked.len() {
        return Err(Error::InvalidBudget {
            k,
            len: ranked.len(),
        });
    }
    Ok(ranked[..k].iter().map(|r| r.id.clone()).collect())
}

fn raw_badness(record: &ScoreRecord, metric: Metric) -> Result<f64> {
    let v = record.require_metric(metric)?;
    Ok(match metric {
        // Larger badness must mean rougher, so negate the spectral score.
        Metric::Sal => -v,
        Metric::Ted => v,
    })
}

/// Fills the badness field of each record with the normalized roughness of
/// `metric`. Records are grouped by domain when domains are present;
/// otherwise the whole set is one group.
pub fn normalize_scores(
    records: &[ScoreRecord],
    mode: Normalization,
    metric: Metric,
) -> Result<Vec<ScoreRecord>> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        groups
            .entry(r.domain.clone().unwrap_or_default())
            .or_default()
            .push(i);
    }
    let mut out = records.to_vec();
    for (name, members) in groups {
        if members.len() < 2 {
            return Err(Error::GroupTooSmall {
                group: if name.is_empty() { "<default>".into() } else { name },
                len: members.len(),
            });
        }
        let mut raw = Vec::with_capacity(members.len());
        for &i in &members {
            raw.push(raw_badness(&records[i], metric)?);
        }
        match mode {
            Normalization::Zscore => {
                let mu = mean(&raw);
                let sigma = pop_std(&raw);
                if sigma <= f64::EPSILON {
                    return Err(Error::DegenerateDistribution(format!(
                        "zero variance in group `{name}`"
                    )));
                }
                for (&i, &b) in members.iter().zip(&raw) {
                    out[i].badness = Some((b - mu) / sigma);
                }
            }
            Normalization::Rank => {
                // 1-based rank of badness within the group; ties by id.
                let mut order: Vec<usize> = (0..members.len()).collect();
                order.sort_by(|&a, &b| {
                    raw[a]
                        .total_cmp(&raw[b])
                        .then_with(|| records[members[a]].id.cmp(&records[members[b]].id))
                });
                let denom = (members.len() - 1) as f64;
                for (pos, &local) in order.iter().enumerate() {
                    out[members[local]].badness = Some(pos as f64 / denom);
                }
            }
        }
    }
    Ok(out)
}

/// Calibrates the weight decay so `w(q10) / w(q90) = ratio`, i.e.
/// `lambda = ln(ratio) / (q90 - q10)` with percentiles by linear
/// interpolation.
pub fn calibrate_lambda(q: &[f64], ratio: f64) -> Result<f64> {
    if q.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least 2 badness values to calibrate".into(),
        ));
    }
    if !(ratio > 1.0) {
        return Err(Error::DomainError(format!(
            "ratio must exceed 1, got {ratio}"
        )));
    }
    let mut sorted = q.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gap = percentile_linear(&sorted, 0.9) - percentile_linear(&sorted, 0.1);
    if gap <= 1e-9 {
        return Err(Error::DegenerateDistribution(
            "badness percentile gap is zero".into(),
        ));
    }
    Ok(ratio.ln() / gap)
}

/// Elementwise soft weights `w = exp(-lambda * q)`.
pub fn soft_weights(q: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(Error::DomainError(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    Ok(q.iter().map(|&v| (-lambda * v).exp()).collect())
}

/// Weight-normalized mean of per-trajectory losses.
pub fn weighted_group_loss(losses: &[f64], weights: &[f64]) -> Result<f64> {
    if losses.len() != weights.len() {
        return Err(Error::ShapeError {
            left: losses.len(),
            right: weights.len(),
        });
    }
    if losses.is_empty() {
        return Err(Error::EmptyInput("loss list"));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    let num: f64 = losses.iter().zip(weights).map(|(l, w)| l * w).sum();
    let den: f64 = weights.iter().sum();
    Ok(num / den)
}

/// A retrieval candidate: its id, the query that produced it, and the
/// primary (retrieval) similarity, larger meaning more similar.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub id: String,
    pub query: String,
    pub similarity: f64,
}

/// Smoothness re-ranking of retrieval candidates.
///
/// Per query: keep the top `r` candidates by similarity, re-sort them by the
/// smoothness metric, and take `floor(k / Q)` each; the remaining `k mod Q`
/// slots go round-robin over queries in sorted order, each contributing its
/// next-best candidate. Returns the kept ids grouped by query.
pub fn rerank_candidates(
    candidates: &[Candidate],
    scores: &BTreeMap<String, ScoreRecord>,
    metric: Metric,
    r: usize,
    k: usize,
) -> Result<Vec<String>> {
    let mut per_query: BTreeMap<String, Vec<&Candidate>> = BTreeMap::new();
    for c in candidates {
        per_query.entry(c.query.clone()).or_default().push(c);
    }
    let q_count = per_query.len();
    if q_count == 0 {
        return Err(Error::EmptyInput("candidate list"));
    }
    if !(r >= k && k >= q_count) {
        return Err(Error::InvalidInput(format!(
            "need R >= K >= Q, got R={r}, K={k}, Q={q_count}"
        )));
    }

    let base = k / q_count;
    let mut remainder = k % q_count;
    let mut pools = Vec::with_capacity(q_count);
    for (query, mut pool) in per_query {
        // Top R by similarity, then re-sorted by smoothness (best first).
        pool.sort_by(|a, b| {
            b.similarity
                .total_cmp(&a.similarity)
                .then_with(|| a.id.cmp(&b.id))
        });
        pool.truncate(r);
        let mut keyed = Vec::with_capacity(pool.len());
        for c in pool {
            let record = scores.get(&c.id).ok_or_else(|| Error::MissingScore {
                id: c.id.clone(),
                metric: metric.to_string(),
            })?;
            keyed.push((record.require_metric(metric)?, &c.id));
        }
        keyed.sort_by(|(a, ia), (b, ib)| {
            let ord = match metric.better_first() {
                Direction::Ascending => a.total_cmp(b),
                Direction::Descending => b.total_cmp(a),
            };
            ord.then_with(|| ia.cmp(ib))
        });
        pools.push((query, keyed));
    }

    let mut kept: Vec<Vec<String>> = vec![Vec::new(); q_count];
    for (qi, (query, pool)) in pools.iter().enumerate() {
        if pool.len() < base {
            return Err(Error::CandidateShortfall {
                query: query.clone(),
                needed: base,
                available: pool.len(),
            });
        }
        kept[qi] = pool[..base].iter().map(|(_, id)| (*id).clone()).collect();
    }
    // Round-robin the remainder in query order from each query's next-best.
    let mut qi = 0;
    while remainder > 0 {
        let (query, pool) = &pools[qi];
        let next = kept[qi].len();
        if next >= pool.len() {
            return Err(Error::CandidateShortfall {
                query: query.clone(),
                needed: next + 1,
                available: pool.len(),
            });
        }
        kept[qi].push(pool[next].1.clone());
        remainder -= 1;
        qi = (qi + 1) % q_count;
    }
    Ok(kept.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    fn record(id: &str, sal: Option<f64>, ted: Option<f64>) -> ScoreRecord {
        ScoreRecord {
            id: id.into(),
            sal,
            ted,
            ..ScoreRecord::default()
        }
    }

    #[test]
    fn sal_ranks_descending() {
        let records = vec![
            record("a", Some(-3.0), None),
            record("b", Some(-5.0), None),
            record("c", Some(-4.0), None),
        ];
        let ranked = rank(&records, Metric::Sal, Metric::Sal.better_first()).unwrap();
        let ids: Vec<_> = ranked.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a", "c", "b"]);
        assert_eq!(ranked[0].rank_sal, Some(1));
    }

    #[test]
    fn ted_ranks_ascending_and_ties_break_by_id() {
        let records = vec![
            record("a", None, Some(0.2)),
            record("b", None, Some(0.1)),
        ];
        let ranked = rank(&records, Metric::Ted, Metric::Ted.better_first()).unwrap();
        let ids: Vec<_> = ranked.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["b", "a"]);

        let tied = vec![
            record("z", None, Some(0.5)),
            record("a", None, Some(0.5)),
        ];
        let ranked = rank(&tied, Metric::Ted, Metric::Ted.better_first()).unwrap();
        assert_eq!(ranked[0].id, "a");
    }

    #[test]
    fn missing_metric_is_an_error() {
        let records = vec![record("a", Some(-1.0), None)];
        assert!(matches!(
            rank(&records, Metric::Ted, Direction::Ascending),
            Err(Error::MissingScore { .. })
        ));
    }

    #[test]
    fn top_k_selection() {
        let records = vec![
            record("a", Some(-3.0), None),
            record("b", Some(-5.0), None),
            record("c", Some(-4.0), None),
        ];
        let ranked = rank(&records, Metric::Sal, Direction::Descending).unwrap();
        assert_eq!(select_top_k(&ranked, 3).unwrap(), ["a", "c", "b"]);
        assert_eq!(select_top_k(&ranked, 1).unwrap(), ["a"]);
        assert_eq!(select_top_k(&ranked, 2).unwrap(), ["a", "c"]);
        assert!(matches!(
            select_top_k(&ranked, 0),
            Err(Error::InvalidBudget { .. })
        ));
        assert!(matches!(
            select_top_k(&ranked, 4),
            Err(Error::InvalidBudget { .. })
        ));
        // Prefix property.
        let two = select_top_k(&ranked, 2).unwrap();
        let three = select_top_k(&ranked, 3).unwrap();
        assert_eq!(&three[..2], &two[..]);
    }

    #[test]
    fn rank_normalization_is_uniform_grid() {
        let records: Vec<ScoreRecord> = (0..11)
            .map(|i| record(&format!("d{i:02}"), None, Some(0.1 * i as f64)))
            .collect();
        let out = normalize_scores(&records, Normalization::Rank, Metric::Ted).unwrap();
        for (i, r) in out.iter().enumerate() {
            assert_abs_diff_eq!(r.badness.unwrap(), i as f64 / 10.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zscore_normalization_of_two_points() {
        let records = vec![
            record("a", None, Some(1.0)),
            record("b", None, Some(3.0)),
        ];
        let out = normalize_scores(&records, Normalization::Zscore, Metric::Ted).unwrap();
        assert_abs_diff_eq!(out[0].badness.unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1].badness.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zscore_rejects_identical_scores() {
        let records = vec![
            record("a", None, Some(0.5)),
            record("b", None, Some(0.5)),
        ];
        assert!(matches!(
            normalize_scores(&records, Normalization::Zscore, Metric::Ted),
            Err(Error::DegenerateDistribution(_))
        ));
    }

    #[test]
    fn sal_badness_is_negated() {
        let records = vec![
            record("smooth", Some(-1.0), None),
            record("rough", Some(-9.0), None),
        ];
        let out = normalize_scores(&records, Normalization::Rank, Metric::Sal).unwrap();
        let smooth = out.iter().find(|r| r.id == "smooth").unwrap();
        let rough = out.iter().find(|r| r.id == "rough").unwrap();
        assert!(smooth.badness.unwrap() < rough.badness.unwrap());
    }

    #[test]
    fn per_domain_groups_normalize_independently() {
        let mut records = vec![
            record("a1", None, Some(0.1)),
            record("a2", None, Some(0.3)),
            record("b1", None, Some(10.0)),
            record("b2", None, Some(30.0)),
        ];
        records[0].domain = Some("a".into());
        records[1].domain = Some("a".into());
        records[2].domain = Some("b".into());
        records[3].domain = Some("b".into());
        let out = normalize_scores(&records, Normalization::Rank, Metric::Ted).unwrap();
        assert_abs_diff_eq!(out[0].badness.unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1].badness.unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[2].badness.unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[3].badness.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_matches_closed_form_on_uniform_grid() {
        let q: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let lambda = calibrate_lambda(&q, 10.0).unwrap();
        assert_abs_diff_eq!(lambda, 10.0f64.ln() / 0.8, epsilon = 1e-12);
    }

    #[test]
    fn lambda_trivial_ratio_e() {
        // q90 - q10 spans exactly 1.
        let q: Vec<f64> = (0..11).map(|i| i as f64 / 8.0).collect();
        let lambda = calibrate_lambda(&q, std::f64::consts::E).unwrap();
        assert_abs_diff_eq!(lambda, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_degenerate_distribution_rejected() {
        assert!(matches!(
            calibrate_lambda(&[0.5; 10], 10.0),
            Err(Error::DegenerateDistribution(_))
        ));
    }

    #[test]
    fn soft_weight_fixtures() {
        assert_eq!(soft_weights(&[0.0], 3.0).unwrap(), vec![1.0]);
        assert_eq!(soft_weights(&[0.3, 0.9], 0.0).unwrap(), vec![1.0, 1.0]);
        let lambda = 10.0f64.ln() / 0.8;
        let w = soft_weights(&[1.0], lambda).unwrap()[0];
        assert_abs_diff_eq!(w, 10.0f64.powf(-1.25), epsilon = 1e-12);
    }

    #[test]
    fn weights_preserve_ranking() {
        let q = [0.1, 0.9, 0.4];
        let w = soft_weights(&q, 2.5).unwrap();
        assert!(w[0] > w[2] && w[2] > w[1]);
    }

    #[test]
    fn calibration_round_trip_hits_the_ratio() {
        let q: Vec<f64> = (0..200).map(|i| (i as f64 * 0.017).sin().abs()).collect();
        let lambda = calibrate_lambda(&q, 10.0).unwrap();
        let mut sorted = q.clone();
        sorted.sort_by(f64::total_cmp);
        let w10 = (-lambda * percentile_linear(&sorted, 0.1)).exp();
        let w90 = (-lambda * percentile_linear(&sorted, 0.9)).exp();
        assert!((w10 / w90 - 10.0).abs() / 10.0 < 0.01);
    }

    #[test]
    fn weighted_loss_fixtures() {
        assert_abs_diff_eq!(
            weighted_group_loss(&[1.0, 3.0], &[1.0, 1.0]).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            weighted_group_loss(&[1.0, 3.0], &[1.0, 3.0]).unwrap(),
            2.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            weighted_group_loss(&[7.0], &[0.4]).unwrap(),
            7.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            weighted_group_loss(&[1.0], &[1.0, 2.0]),
            Err(Error::ShapeError { .. })
        ));
    }

    fn rerank_fixture() -> (Vec<Candidate>, BTreeMap<String, ScoreRecord>) {
        // Two queries, four candidates each; ted increases with the index,
        // similarity decreases, so similarity order != smoothness order.
        let mut candidates = Vec::new();
        let mut scores = BTreeMap::new();
        for q in ["q1", "q2"] {
            for i in 0..4 {
                let id = format!("{q}-c{i}");
                candidates.push(Candidate {
                    id: id.clone(),
                    query: q.into(),
                    similarity: 1.0 - 0.1 * i as f64,
                });
                scores.insert(
                    id.clone(),
                    ScoreRecord {
                        id,
                        ted: Some(1.0 - 0.2 * i as f64),
                        ..ScoreRecord::default()
                    },
                );
            }
        }
        (candidates, scores)
    }

    #[test]
    fn rerank_single_query_full_budget() {
        let (mut candidates, scores) = rerank_fixture();
        candidates.retain(|c| c.query == "q1");
        let kept = rerank_candidates(&candidates, &scores, Metric::Ted, 4, 4).unwrap();
        // All four kept, ordered by ted ascending.
        assert_eq!(kept, ["q1-c3", "q1-c2", "q1-c1", "q1-c0"]);
    }

    #[test]
    fn rerank_round_robin_remainder() {
        let (candidates, scores) = rerank_fixture();
        let kept = rerank_candidates(&candidates, &scores, Metric::Ted, 8, 5).unwrap();
        assert_eq!(kept.len(), 5);
        // floor(5/2) = 2 each; the remainder slot goes to the first query.
        let q1: Vec<_> = kept.iter().filter(|id| id.starts_with("q1")).collect();
        let q2: Vec<_> = kept.iter().filter(|id| id.starts_with("q2")).collect();
        assert_eq!(q1.len(), 3);
        assert_eq!(q2.len(), 2);
    }

    #[test]
    fn rerank_k_equals_q_keeps_single_best() {
        let (candidates, scores) = rerank_fixture();
        let kept = rerank_candidates(&candidates, &scores, Metric::Ted, 4, 2).unwrap();
        assert_eq!(kept, ["q1-c3", "q2-c3"]);
    }

    #[test]
    fn rerank_shortfall_is_an_error() {
        let (mut candidates, scores) = rerank_fixture();
        candidates.retain(|c| c.query == "q1" || c.id == "q2-c0");
        let err = rerank_candidates(&candidates, &scores, Metric::Ted, 8, 6).unwrap_err();
        assert!(matches!(err, Error::CandidateShortfall { .. }));
    }

    proptest! {
        #[test]
        fn ranking_invariant_under_monotone_transform(
            values in prop::collection::vec(-100.0f64..100.0, 2..30)
        ) {
            let records: Vec<ScoreRecord> = values
                .iter()
                .enumerate()
                .map(|(i, v)| record(&format!("r{i:03}"), None, Some(*v)))
                .collect();
            let transformed: Vec<ScoreRecord> = values
                .iter()
                .enumerate()
                .map(|(i, v)| record(&format!("r{i:03}"), None, Some(v.exp())))
                .collect();
            let a = rank(&records, Metric::Ted, Direction::Ascending).unwrap();
            let b = rank(&transformed, Metric::Ted, Direction::Ascending).unwrap();
            let ids_a: Vec<_> = a.iter().map(|r| r.id.clone()).collect();
            let ids_b: Vec<_> = b.iter().map(|r| r.id.clone()).collect();
            prop_assert_eq!(ids_a, ids_b);
        }

        #[test]
        fn rank_badness_always_spans_unit_interval(
            values in prop::collection::vec(-50.0f64..50.0, 2..40)
        ) {
            let records: Vec<ScoreRecord> = values
                .iter()
                .enumerate()
                .map(|(i, v)| record(&format!("r{i:03}"), None, Some(*v)))
                .collect();
            let out = normalize_scores(&records, Normalization::Rank, Metric::Ted).unwrap();
            let qs: Vec<f64> = out.iter().map(|r| r.badness.unwrap()).collect();
            let min = qs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = qs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((min - 0.0).abs() < 1e-12);
            prop_assert!((max - 1.0).abs() < 1e-12);
        }
    }
}
