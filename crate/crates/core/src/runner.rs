//! Corpus scoring: configuration and the worker pool.

use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use serde::Deserialize;

use crate::bridge::{BridgeConfig, DEFAULT_BATCH_SIZE, DEFAULT_TIMEOUT};
use crate::corpus::{EvalInstance, RecordScores, ScoreRecord};
use crate::matchers::{Matcher, MatcherKind, MatcherSpec, PairCache};
use crate::smart::{
    aggregate_reference_triples, aggregate_triples, smart_for_pair, AggregationPolicy, ReportField, SmartTriple,
    SourceRefMode, Variant,
};
use crate::textprep::{split_sentences, SplitMode};
use crate::Error;

/// Unvalidated scoring options, as given by flags or a config file.
///
/// Config files use the flag names as keys:
///
/// ```toml
/// matcher = "chrf"
/// agg = "max"
/// variants = "S1,S2,SL"
/// workers = 4
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScoreOptions {
    pub matcher: Option<String>,
    pub bridge_cmd: Option<String>,
    pub bridge_label: Option<String>,
    /// Seconds.
    pub bridge_timeout: Option<f64>,
    pub batch_size: Option<usize>,
    pub agg: Option<String>,
    pub report: Option<String>,
    pub split: Option<String>,
    pub variants: Option<String>,
    pub workers: Option<usize>,
    /// Only read by the bucket analysis.
    pub buckets: Option<usize>,
}

impl ScoreOptions {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(format!("invalid config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("cannot read {}", path.display()), e))?;
        Self::from_toml(&text)
    }

    /// Fields set in `self` win over those in `fallback`.
    pub fn or(self, fallback: ScoreOptions) -> ScoreOptions {
        ScoreOptions {
            matcher: self.matcher.or(fallback.matcher),
            bridge_cmd: self.bridge_cmd.or(fallback.bridge_cmd),
            bridge_label: self.bridge_label.or(fallback.bridge_label),
            bridge_timeout: self.bridge_timeout.or(fallback.bridge_timeout),
            batch_size: self.batch_size.or(fallback.batch_size),
            agg: self.agg.or(fallback.agg),
            report: self.report.or(fallback.report),
            split: self.split.or(fallback.split),
            variants: self.variants.or(fallback.variants),
            workers: self.workers.or(fallback.workers),
            buckets: self.buckets.or(fallback.buckets),
        }
    }

    /// Validates everything and applies defaults: chrf, max, f, rule-based
    /// splitting, all variants, one worker per available core.
    pub fn resolve(&self) -> Result<RunConfig, Error> {
        let kind: MatcherKind = self.matcher.as_deref().unwrap_or("chrf").parse()?;
        let matcher = match (kind, &self.bridge_cmd) {
            (MatcherKind::External, Some(cmd)) => {
                let mut cfg = BridgeConfig::from_command_line(cmd)?;
                if let Some(label) = &self.bridge_label {
                    cfg.label = label.to_uppercase();
                }
                cfg.timeout = match self.bridge_timeout {
                    Some(secs) if secs.is_finite() && secs > 0.0 => Duration::from_secs_f64(secs),
                    Some(secs) => return Err(Error::Config(format!("invalid bridge timeout {secs}"))),
                    None => DEFAULT_TIMEOUT,
                };
                cfg.batch_size = self.batch_size.unwrap_or(DEFAULT_BATCH_SIZE);
                MatcherSpec::external(cfg)?
            }
            (MatcherKind::External, None) => {
                return Err(Error::Config("--matcher external requires --bridge-cmd".into()))
            }
            (_, Some(_)) => {
                return Err(Error::Config(format!(
                    "--bridge-cmd is only valid with --matcher external, not {kind}"
                )))
            }
            (_, None) => MatcherSpec::builtin(kind)?,
        };
        let source_ref_mode = self.agg.as_deref().map_or(Ok(SourceRefMode::Max), str::parse)?;
        let report = self.report.as_deref().map_or(Ok(ReportField::F), str::parse)?;
        let split = match &self.split {
            Some(s) => s.parse().map_err(Error::Config)?,
            None => SplitMode::Rule,
        };
        let variants = match &self.variants {
            Some(list) => parse_variants(list)?,
            None => Variant::ALL.to_vec(),
        };
        let workers = match self.workers {
            Some(0) => return Err(Error::Config("--workers must be at least 1".into())),
            Some(n) => n,
            None => thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(RunConfig {
            matcher,
            variants,
            policy: AggregationPolicy { source_ref_mode, report },
            split,
            workers,
        })
    }
}

/// Parses a comma-separated variant list, keeping S1, S2, SL order.
pub fn parse_variants(list: &str) -> Result<Vec<Variant>, Error> {
    let mut out = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let v: Variant = part.parse()?;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no variants selected".into()));
    }
    out.sort();
    Ok(out)
}

/// A validated scoring configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub matcher: MatcherSpec,
    pub variants: Vec<Variant>,
    pub policy: AggregationPolicy,
    pub split: SplitMode,
    pub workers: usize,
}

impl RunConfig {
    /// chrF, max aggregation, F-measure, all variants, one worker.
    pub fn new(matcher: MatcherSpec) -> Self {
        RunConfig {
            matcher,
            variants: Variant::ALL.to_vec(),
            policy: AggregationPolicy::default(),
            split: SplitMode::Rule,
            workers: 1,
        }
    }

    /// Name stored in the `matcher` field of score records.
    pub fn matcher_name(&self) -> String {
        match &self.matcher {
            MatcherSpec::Builtin(b) => b.kind().as_str().to_owned(),
            MatcherSpec::External(cfg) => cfg.label.to_lowercase(),
        }
    }
}

/// SMART of one instance: per-reference scores, the best reference, then
/// the combination with the source score.
pub fn score_instance<M: Matcher + ?Sized>(
    inst: &EvalInstance,
    config: &RunConfig,
    matcher: &mut M,
    cache: Option<&PairCache>,
) -> Result<SmartTriple, Error> {
    let policy = config.policy;
    let candidate = split_sentences(&inst.candidate, config.split);

    let reference = if policy.source_ref_mode.uses_references() {
        let mut per_ref = Vec::with_capacity(inst.references.len());
        for r in &inst.references {
            let grounding = split_sentences(r, config.split);
            per_ref.push(smart_for_pair(&grounding, &candidate, matcher, cache)?);
        }
        aggregate_reference_triples(&per_ref, policy.report)
            .ok_or_else(|| Error::Config("record has no references".into()))?
    } else {
        SmartTriple::ZERO
    };

    let source = if policy.source_ref_mode.uses_source() {
        let grounding = split_sentences(&inst.source, config.split);
        smart_for_pair(&grounding, &candidate, matcher, cache)?
    } else {
        SmartTriple::ZERO
    };

    Ok(aggregate_triples(&source, &reference, policy))
}

fn check_inputs(instances: &[EvalInstance], config: &RunConfig) -> Result<(), Error> {
    if !config.policy.source_ref_mode.uses_references() {
        return Ok(());
    }
    match instances.iter().position(|i| i.references.is_empty()) {
        Some(idx) => Err(record_error(
            idx,
            &instances[idx],
            Error::Config(format!(
                "no references, but aggregation `{:?}` needs them",
                config.policy.source_ref_mode
            )),
        )),
        None => Ok(()),
    }
}

fn record_error(idx: usize, inst: &EvalInstance, source: Error) -> Error {
    Error::Record {
        line: idx + 1,
        system_id: inst.system_id.clone(),
        example_id: inst.example_id.clone(),
        source: Box::new(source),
    }
}

/// Scores every instance and returns records in input order.
///
/// Each worker owns a matcher instance (one bridge process per worker for
/// external matchers); all workers share one pair cache. The first failure
/// stops the pool and is returned with its record number.
pub fn score_corpus(instances: &[EvalInstance], config: &RunConfig) -> Result<Vec<ScoreRecord>, Error> {
    check_inputs(instances, config)?;
    if instances.is_empty() {
        return Ok(Vec::new());
    }
    let cache = PairCache::new();
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let workers = config.workers.clamp(1, instances.len());
    let (tx, rx) = mpsc::channel::<(usize, Result<SmartTriple, Error>)>();

    let mut results: Vec<Option<SmartTriple>> = vec![None; instances.len()];
    let mut first_error: Option<(usize, Error)> = None;

    thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, abort, cache) = (&next, &abort, &cache);
            scope.spawn(move || {
                let mut matcher = match config.matcher.instantiate() {
                    Ok(m) => m,
                    Err(e) => {
                        abort.store(true, Ordering::Relaxed);
                        let _ = tx.send((0, Err(e)));
                        return;
                    }
                };
                while !abort.load(Ordering::Relaxed) {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    let Some(inst) = instances.get(idx) else { break };
                    let result = score_instance(inst, config, &mut matcher, Some(cache));
                    if result.is_err() {
                        abort.store(true, Ordering::Relaxed);
                    }
                    if tx.send((idx, result)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);
        for (idx, result) in rx {
            match result {
                Ok(triple) => results[idx] = Some(triple),
                Err(e) => {
                    if first_error.as_ref().is_none_or(|(i, _)| idx < *i) {
                        first_error = Some((idx, e));
                    }
                }
            }
        }
    });

    if let Some((idx, e)) = first_error {
        return Err(record_error(idx, &instances[idx], e));
    }
    let name = config.matcher_name();
    Ok(instances
        .iter()
        .zip(results)
        .map(|(inst, triple)| ScoreRecord {
            system_id: inst.system_id.clone(),
            example_id: inst.example_id.clone(),
            matcher: name.clone(),
            scores: RecordScores::from_triple(
                &triple.expect("every index is scored when no error occurred"),
                &config.variants,
                config.policy.report,
            ),
        })
        .collect())
}
