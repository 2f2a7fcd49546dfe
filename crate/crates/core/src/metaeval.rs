//! System-level meta-evaluation against human judgments.
//!
//! Correlations are computed between per-system means: every system's metric
//! values and human scores are averaged over its examples first, then the
//! systems are ranked. Summary-level correlation is not provided.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{EvalInstance, InstanceKey};
use crate::textprep::tokenize;

#[derive(Debug, Error, PartialEq)]
pub enum MetaEvalError {
    #[error("length mismatch: {0} vs {1} values")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 values, got {0}")]
    TooShort(usize),
    #[error("input contains NaN")]
    NotANumber,
    #[error("no human {dim} score for system `{system_id}`, example `{example_id}`")]
    MissingHuman {
        dim: QualityDimension,
        system_id: String,
        example_id: String,
    },
    #[error("no metric value for system `{system_id}`, example `{example_id}`")]
    MissingMetric { system_id: String, example_id: String },
    #[error("need at least 2 systems, found {0}")]
    TooFewSystems(usize),
    #[error("bucket count must be at least 2, got {0}")]
    BucketCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QualityDimension {
    Coherence,
    Factuality,
    Fluency,
    Informativeness,
}

impl QualityDimension {
    pub const ALL: [QualityDimension; 4] = [
        QualityDimension::Coherence,
        QualityDimension::Factuality,
        QualityDimension::Fluency,
        QualityDimension::Informativeness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QualityDimension::Coherence => "coherence",
            QualityDimension::Factuality => "factuality",
            QualityDimension::Fluency => "fluency",
            QualityDimension::Informativeness => "informativeness",
        }
    }

    /// Three-letter column header.
    pub fn short(self) -> &'static str {
        match self {
            QualityDimension::Coherence => "Coh",
            QualityDimension::Factuality => "Fac",
            QualityDimension::Fluency => "Flu",
            QualityDimension::Informativeness => "Inf",
        }
    }
}

impl fmt::Display for QualityDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QualityDimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        QualityDimension::ALL
            .into_iter()
            .find(|d| d.as_str() == lower || d.short().to_lowercase() == lower)
            .ok_or_else(|| format!("unknown quality dimension `{s}`"))
    }
}

/// Metric value per `(system, example)`.
pub type ScoreTable = HashMap<InstanceKey, f64>;

/// Kendall tau-b.
///
/// `(C - D) / sqrt((C + D + Tx) * (C + D + Ty))`, where `Tx` (`Ty`) counts
/// pairs tied only in `x` (`y`). Returns NaN when every `x` or every `y` is
/// tied. Runs in `O(n log n)` via a merge sort that counts discordant pairs.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, MetaEvalError> {
    if x.len() != y.len() {
        return Err(MetaEvalError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(MetaEvalError::TooShort(n));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(MetaEvalError::NotANumber);
    }

    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let total = pair_count(n as u64);
    let mut tied_x = 0u64;
    let mut tied_xy = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pairs[j].0 == pairs[i].0 {
            j += 1;
        }
        tied_x += pair_count((j - i) as u64);
        let mut k = i;
        while k < j {
            let mut l = k + 1;
            while l < j && pairs[l].1 == pairs[k].1 {
                l += 1;
            }
            tied_xy += pair_count((l - k) as u64);
            k = l;
        }
        i = j;
    }

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buffer = vec![0.0; n];
    let discordant = merge_count(&mut ys, &mut buffer);

    let mut tied_y = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && ys[j] == ys[i] {
            j += 1;
        }
        tied_y += pair_count((j - i) as u64);
        i = j;
    }

    let concordant = total + tied_xy - tied_x - tied_y - discordant;
    Ok(tau_b_from_counts(concordant, discordant, total - tied_y, total - tied_x))
}

/// `(C - D) / sqrt(untied_y_side * untied_x_side)` where the two factors are
/// `C + D + Tx` and `C + D + Ty`.
pub fn tau_b_from_counts(concordant: u64, discordant: u64, c_d_tx: u64, c_d_ty: u64) -> f64 {
    if c_d_tx == 0 || c_d_ty == 0 {
        return f64::NAN;
    }
    let numerator = concordant as f64 - discordant as f64;
    numerator / ((c_d_tx as f64) * (c_d_ty as f64)).sqrt()
}

fn pair_count(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn merge_count(v: &mut [f64], buffer: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buffer.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buffer[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buffer[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buffer[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buffer[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buffer[..n]);
    swaps
}

/// Per-example values of one system and their mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemScores {
    pub system_id: String,
    pub per_example: Vec<(String, f64)>,
    pub mean: f64,
}

/// Groups `instances` by system (sorted by id) and averages `value_of`.
fn per_system<'a, F>(instances: &[&'a EvalInstance], mut value_of: F) -> Result<Vec<SystemScores>, MetaEvalError>
where
    F: FnMut(&'a EvalInstance) -> Result<f64, MetaEvalError>,
{
    let mut grouped: BTreeMap<&str, Vec<(String, f64)>> = BTreeMap::new();
    for inst in instances {
        let v = value_of(inst)?;
        grouped
            .entry(inst.system_id.as_str())
            .or_default()
            .push((inst.example_id.clone(), v));
    }
    Ok(grouped
        .into_iter()
        .map(|(system_id, per_example)| {
            let mean = per_example.iter().map(|(_, v)| v).sum::<f64>() / per_example.len() as f64;
            SystemScores {
                system_id: system_id.to_owned(),
                per_example,
                mean,
            }
        })
        .collect())
}

fn human_value(inst: &EvalInstance, dim: QualityDimension) -> Result<f64, MetaEvalError> {
    inst.human_score(dim).ok_or_else(|| MetaEvalError::MissingHuman {
        dim,
        system_id: inst.system_id.clone(),
        example_id: inst.example_id.clone(),
    })
}

fn metric_value(inst: &EvalInstance, values: &ScoreTable) -> Result<f64, MetaEvalError> {
    values.get(&inst.key()).copied().ok_or_else(|| MetaEvalError::MissingMetric {
        system_id: inst.system_id.clone(),
        example_id: inst.example_id.clone(),
    })
}

/// System means for the human dimension and the metric, aligned by system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemMeans {
    pub system_id: String,
    pub human: f64,
    pub metric: f64,
}

pub fn system_means(
    instances: &[&EvalInstance],
    metric_values: &ScoreTable,
    dim: QualityDimension,
) -> Result<Vec<SystemMeans>, MetaEvalError> {
    let human = per_system(instances, |i| human_value(i, dim))?;
    let metric = per_system(instances, |i| metric_value(i, metric_values))?;
    Ok(human
        .into_iter()
        .zip(metric)
        .map(|(h, m)| SystemMeans {
            system_id: h.system_id,
            human: h.mean,
            metric: m.mean,
        })
        .collect())
}

/// Kendall tau between per-system metric means and human means.
pub fn system_level_correlation(
    instances: &[EvalInstance],
    metric_values: &ScoreTable,
    dim: QualityDimension,
) -> Result<f64, MetaEvalError> {
    let refs: Vec<&EvalInstance> = instances.iter().collect();
    correlation_of(&refs, metric_values, dim)
}

fn correlation_of(
    instances: &[&EvalInstance],
    metric_values: &ScoreTable,
    dim: QualityDimension,
) -> Result<f64, MetaEvalError> {
    let means = system_means(instances, metric_values, dim)?;
    if means.len() < 2 {
        return Err(MetaEvalError::TooFewSystems(means.len()));
    }
    let metric: Vec<f64> = means.iter().map(|m| m.metric).collect();
    let human: Vec<f64> = means.iter().map(|m| m.human).collect();
    kendall_tau(&metric, &human)
}

/// One metric's correlations across dimensions plus their mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub taus: BTreeMap<QualityDimension, f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaEvalReport {
    pub dims: Vec<QualityDimension>,
    pub rows: Vec<CorrelationRow>,
}

/// Correlation table for several metrics (`(name, values)`) over `dims`.
pub fn correlation_report(
    instances: &[EvalInstance],
    metrics: &[(String, ScoreTable)],
    dims: &[QualityDimension],
) -> Result<MetaEvalReport, MetaEvalError> {
    let rows = metrics
        .iter()
        .map(|(name, values)| {
            let mut taus = BTreeMap::new();
            for &dim in dims {
                taus.insert(dim, system_level_correlation(instances, values, dim)?);
            }
            let mean = taus.values().sum::<f64>() / taus.len().max(1) as f64;
            Ok(CorrelationRow {
                metric: name.clone(),
                taus,
                mean,
            })
        })
        .collect::<Result<Vec<_>, MetaEvalError>>()?;
    Ok(MetaEvalReport {
        dims: dims.to_vec(),
        rows,
    })
}

impl fmt::Display for MetaEvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.metric.len()).max().unwrap_or(6).max(6);
        write!(f, "{:<width$}", "metric")?;
        for d in &self.dims {
            write!(f, " {:>7}", d.short())?;
        }
        writeln!(f, " {:>7}", "mu")?;
        for row in &self.rows {
            write!(f, "{:<width$}", row.metric)?;
            for d in &self.dims {
                write!(f, " {:>7}", fmt_tau(row.taus[d]))?;
            }
            writeln!(f, " {:>7}", fmt_tau(row.mean))?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_tau(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else {
        format!("{v:.3}")
    }
}

/// Correlations within one length bucket.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketReport {
    pub index: usize,
    pub example_ids: Vec<String>,
    pub min_length: f64,
    pub max_length: f64,
    pub systems: usize,
    pub tau_metric: f64,
    pub tau_baseline: f64,
    /// `tau_metric - tau_baseline` (an absolute difference).
    pub relative_increase: f64,
    /// Fewer than two systems, so no correlation exists.
    pub degenerate: bool,
}

/// Mean token count over an instance's references.
pub fn mean_reference_tokens(inst: &EvalInstance) -> f64 {
    if inst.references.is_empty() {
        return 0.0;
    }
    let total: usize = inst.references.iter().map(|r| tokenize(r).len()).sum();
    total as f64 / inst.references.len() as f64
}

/// Splits examples into `buckets` equal-count groups by mean reference
/// length (ties broken by example id) and correlates metric and baseline
/// with humans inside each group.
pub fn length_bucket_analysis(
    instances: &[EvalInstance],
    metric_values: &ScoreTable,
    baseline_values: &ScoreTable,
    dim: QualityDimension,
    buckets: usize,
) -> Result<Vec<BucketReport>, MetaEvalError> {
    if buckets < 2 {
        return Err(MetaEvalError::BucketCount(buckets));
    }
    let mut lengths: BTreeMap<&str, f64> = BTreeMap::new();
    for inst in instances {
        lengths
            .entry(inst.example_id.as_str())
            .or_insert_with(|| mean_reference_tokens(inst));
    }
    let mut examples: Vec<(&str, f64)> = lengths.into_iter().collect();
    examples.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));

    let base = examples.len() / buckets;
    let extra = examples.len() % buckets;
    let mut reports = Vec::with_capacity(buckets);
    let mut start = 0;
    for index in 0..buckets {
        let size = base + usize::from(index < extra);
        let chunk = &examples[start..start + size];
        start += size;

        let ids: HashSet<&str> = chunk.iter().map(|(id, _)| *id).collect();
        let members: Vec<&EvalInstance> = instances
            .iter()
            .filter(|i| ids.contains(i.example_id.as_str()))
            .collect();
        let systems = members.iter().map(|i| i.system_id.as_str()).collect::<HashSet<_>>().len();
        let degenerate = systems < 2;
        let (tau_metric, tau_baseline) = if degenerate {
            (f64::NAN, f64::NAN)
        } else {
            (
                correlation_of(&members, metric_values, dim)?,
                correlation_of(&members, baseline_values, dim)?,
            )
        };
        reports.push(BucketReport {
            index,
            example_ids: chunk.iter().map(|(id, _)| (*id).to_owned()).collect(),
            min_length: chunk.first().map_or(f64::NAN, |c| c.1),
            max_length: chunk.last().map_or(f64::NAN, |c| c.1),
            systems,
            tau_metric,
            tau_baseline,
            relative_increase: tau_metric - tau_baseline,
            degenerate,
        });
    }
    Ok(reports)
}

/// Human and metric rank of one system (1 = best).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemRank {
    pub system_id: String,
    pub human_mean: f64,
    pub metric_mean: f64,
    pub human_rank: f64,
    pub metric_rank: f64,
    /// `human_rank - metric_rank`; negative when the metric ranks the system
    /// higher than humans do.
    pub rank_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub systems: Vec<SystemRank>,
    /// Population standard deviation of `rank_diff`.
    pub stddev: f64,
    /// Share of system pairs ordered the same way by metric and humans.
    pub pairwise_accuracy: f64,
}

/// Ranks with 1 for the largest value; tied values share their mean rank.
pub fn descending_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let mean_rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = mean_rank;
        }
        i = j;
    }
    ranks
}

pub fn bias_analysis(
    instances: &[EvalInstance],
    metric_values: &ScoreTable,
    dim: QualityDimension,
) -> Result<BiasReport, MetaEvalError> {
    let refs: Vec<&EvalInstance> = instances.iter().collect();
    let means = system_means(&refs, metric_values, dim)?;
    if means.len() < 2 {
        return Err(MetaEvalError::TooFewSystems(means.len()));
    }
    let human: Vec<f64> = means.iter().map(|m| m.human).collect();
    let metric: Vec<f64> = means.iter().map(|m| m.metric).collect();
    let human_ranks = descending_ranks(&human);
    let metric_ranks = descending_ranks(&metric);

    let systems: Vec<SystemRank> = means
        .iter()
        .enumerate()
        .map(|(i, m)| SystemRank {
            system_id: m.system_id.clone(),
            human_mean: m.human,
            metric_mean: m.metric,
            human_rank: human_ranks[i],
            metric_rank: metric_ranks[i],
            rank_diff: human_ranks[i] - metric_ranks[i],
        })
        .collect();

    let n = systems.len() as f64;
    let mean_diff = systems.iter().map(|s| s.rank_diff).sum::<f64>() / n;
    let variance = systems.iter().map(|s| (s.rank_diff - mean_diff).powi(2)).sum::<f64>() / n;

    let mut agree = 0usize;
    let mut pairs = 0usize;
    for a in 0..means.len() {
        for b in a + 1..means.len() {
            pairs += 1;
            let h = human[a].partial_cmp(&human[b]).unwrap_or(Ordering::Equal);
            let m = metric[a].partial_cmp(&metric[b]).unwrap_or(Ordering::Equal);
            if h == m {
                agree += 1;
            }
        }
    }

    Ok(BiasReport {
        systems,
        stddev: variance.sqrt(),
        pairwise_accuracy: agree as f64 / pairs as f64,
    })
}

/// Aligned-column rendering of a bucket analysis.
pub struct BucketTable<'a>(pub &'a [BucketReport]);

impl fmt::Display for BucketTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>8} {:>15} {:>7} {:>8} {:>8} {:>8}",
            "bucket", "examples", "ref_tokens", "systems", "metric", "baseline", "diff"
        )?;
        for b in self.0 {
            let range = format!("{:.1}-{:.1}", b.min_length, b.max_length);
            write!(
                f,
                "{:>6} {:>8} {:>15} {:>7} {:>8} {:>8} {:>8}",
                b.index,
                b.example_ids.len(),
                range,
                b.systems,
                fmt_tau(b.tau_metric),
                fmt_tau(b.tau_baseline),
                fmt_tau(b.relative_increase)
            )?;
            if b.degenerate {
                write!(f, "  (degenerate)")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for BiasReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.systems.iter().map(|s| s.system_id.len()).max().unwrap_or(6).max(6);
        writeln!(
            f,
            "{:<width$} {:>10} {:>10} {:>10} {:>11} {:>9}",
            "system", "human", "metric", "human_rank", "metric_rank", "rank_diff"
        )?;
        for s in &self.systems {
            writeln!(
                f,
                "{:<width$} {:>10.4} {:>10.4} {:>10.1} {:>11.1} {:>+9.1}",
                s.system_id, s.human_mean, s.metric_mean, s.human_rank, s.metric_rank, s.rank_diff
            )?;
        }
        writeln!(f, "rank_diff stddev: {:.4}", self.stddev)?;
        writeln!(f, "pairwise accuracy: {:.4}", self.pairwise_accuracy)
    }
}
