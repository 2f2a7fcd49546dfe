//! JSONL corpus and score files.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::metaeval::{QualityDimension, ScoreTable};
use crate::smart::{metric_name, ReportField, SmartScore, SmartTriple, Variant};
use crate::Error;

/// Identifies one candidate summary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceKey {
    pub system_id: String,
    pub example_id: String,
}

/// One system output for one example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalInstance {
    pub system_id: String,
    pub example_id: String,
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub references: Vec<String>,
    pub candidate: String,
    /// Human ratings, typically on a 1 to 5 scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human: Option<BTreeMap<QualityDimension, f64>>,
}

impl EvalInstance {
    pub fn key(&self) -> InstanceKey {
        InstanceKey {
            system_id: self.system_id.clone(),
            example_id: self.example_id.clone(),
        }
    }

    pub fn human_score(&self, dim: QualityDimension) -> Option<f64> {
        self.human.as_ref()?.get(&dim).copied()
    }
}

/// Parses JSONL records, one per non-empty line. `origin` names the input
/// in error messages.
pub fn parse_jsonl<T, R>(reader: R, origin: &str) -> Result<Vec<(usize, T)>, Error>
where
    T: for<'de> Deserialize<'de>,
    R: BufRead,
{
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(format!("{origin}:{line_no}"), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Corpus {
            path: origin.to_owned(),
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((line_no, record));
    }
    Ok(out)
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(format!("cannot open {}", path.display()), e))
}

/// Reads a corpus and checks that `(system_id, example_id)` is unique.
pub fn parse_corpus<R: BufRead>(reader: R, origin: &str) -> Result<Vec<EvalInstance>, Error> {
    let records: Vec<(usize, EvalInstance)> = parse_jsonl(reader, origin)?;
    let mut seen = HashMap::new();
    for (line, inst) in &records {
        if let Some(first) = seen.insert(inst.key(), *line) {
            return Err(Error::Corpus {
                path: origin.to_owned(),
                line: *line,
                message: format!(
                    "duplicate record for system `{}`, example `{}` (first on line {first})",
                    inst.system_id, inst.example_id
                ),
            });
        }
    }
    Ok(records.into_iter().map(|(_, inst)| inst).collect())
}

pub fn read_corpus(path: &Path) -> Result<Vec<EvalInstance>, Error> {
    parse_corpus(open(path)?, &path.display().to_string())
}

/// Scores of one variant set, as written to score files.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RecordScores {
    #[serde(rename = "S1", default, skip_serializing_if = "Option::is_none")]
    pub s1: Option<SmartScore>,
    #[serde(rename = "S2", default, skip_serializing_if = "Option::is_none")]
    pub s2: Option<SmartScore>,
    #[serde(rename = "SL", default, skip_serializing_if = "Option::is_none")]
    pub sl: Option<SmartScore>,
    /// Mean of S1, S2 and SL on the report field chosen at scoring time.
    #[serde(rename = "SX", default, skip_serializing_if = "Option::is_none")]
    pub sx: Option<f64>,
}

impl RecordScores {
    /// Keeps `variants` of `triple`, rounded to six decimals. SX is present
    /// only when all three variants are.
    pub fn from_triple(triple: &SmartTriple, variants: &[Variant], report: ReportField) -> Self {
        let keep = |v: Variant| variants.contains(&v).then(|| round_score(triple.get(v)));
        let all = Variant::ALL.iter().all(|v| variants.contains(v));
        RecordScores {
            s1: keep(Variant::S1),
            s2: keep(Variant::S2),
            sl: keep(Variant::SL),
            sx: all.then(|| round6(triple.smart_x(report))),
        }
    }

    pub fn get(&self, variant: Variant) -> Option<SmartScore> {
        match variant {
            Variant::S1 => self.s1,
            Variant::S2 => self.s2,
            Variant::SL => self.sl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub system_id: String,
    pub example_id: String,
    pub matcher: String,
    pub scores: RecordScores,
}

impl ScoreRecord {
    pub fn key(&self) -> InstanceKey {
        InstanceKey {
            system_id: self.system_id.clone(),
            example_id: self.example_id.clone(),
        }
    }
}

pub fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn round_score(s: SmartScore) -> SmartScore {
    SmartScore {
        precision: round6(s.precision),
        recall: round6(s.recall),
        fmeasure: round6(s.fmeasure),
    }
}

pub fn parse_scores<R: BufRead>(reader: R, origin: &str) -> Result<Vec<ScoreRecord>, Error> {
    Ok(parse_jsonl(reader, origin)?.into_iter().map(|(_, r)| r).collect())
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRecord>, Error> {
    parse_scores(open(path)?, &path.display().to_string())
}

pub fn write_jsonl<T: Serialize, W: Write>(mut writer: W, records: &[T]) -> Result<(), Error> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n").map_err(|e| Error::io("write failed", e))?;
    }
    writer.flush().map_err(|e| Error::io("write failed", e))
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so an aborted run never leaves a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Error> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::io(format!("cannot create temp file in {}", dir.display()), e))?;
    tmp.write_all(contents)
        .map_err(|e| Error::io(format!("cannot write {}", path.display()), e))?;
    tmp.persist(path)
        .map_err(|e| Error::io(format!("cannot write {}", path.display()), e.error))?;
    Ok(())
}

/// A metric column extracted from score records: a variant or `SX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricColumn {
    Variant(Variant),
    SmartX,
}

impl MetricColumn {
    pub const ALL: [MetricColumn; 4] = [
        MetricColumn::Variant(Variant::S1),
        MetricColumn::Variant(Variant::S2),
        MetricColumn::Variant(Variant::SL),
        MetricColumn::SmartX,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricColumn::Variant(v) => v.as_str(),
            MetricColumn::SmartX => "SX",
        }
    }

    fn value(self, scores: &RecordScores, field: ReportField) -> Option<f64> {
        match self {
            MetricColumn::Variant(v) => scores.get(v).map(|s| s.get(field)),
            MetricColumn::SmartX => scores.sx,
        }
    }
}

impl std::str::FromStr for MetricColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("sx") {
            return Ok(MetricColumn::SmartX);
        }
        s.parse().map(MetricColumn::Variant)
    }
}

/// Values of one metric column keyed by instance, with its display name
/// (e.g. `SL-CHRF`). Fails when a record lacks the column.
pub fn metric_table(
    records: &[ScoreRecord],
    column: MetricColumn,
    field: ReportField,
) -> Result<(String, ScoreTable), Error> {
    let matcher = records.first().map_or_else(String::new, |r| r.matcher.to_uppercase());
    let mut table = ScoreTable::with_capacity(records.len());
    for r in records {
        let v = column.value(&r.scores, field).ok_or_else(|| {
            Error::Config(format!(
                "score record for system `{}`, example `{}` has no {} value",
                r.system_id,
                r.example_id,
                column.as_str()
            ))
        })?;
        table.insert(r.key(), v);
    }
    Ok((metric_name(column.as_str(), &matcher), table))
}

/// Every column present in all records, in S1, S2, SL, SX order.
pub fn available_columns(records: &[ScoreRecord]) -> Vec<MetricColumn> {
    MetricColumn::ALL
        .into_iter()
        .filter(|c| !records.is_empty() && records.iter().all(|r| c.value(&r.scores, ReportField::F).is_some()))
        .collect()
}

/// Fails unless every corpus instance has a score.
pub fn check_coverage(instances: &[EvalInstance], table: &ScoreTable) -> Result<(), Error> {
    let missing: Vec<&EvalInstance> = instances.iter().filter(|i| !table.contains_key(&i.key())).collect();
    match missing.first() {
        None => Ok(()),
        Some(first) => Err(Error::Coverage {
            missing: missing.len(),
            system_id: first.system_id.clone(),
            example_id: first.example_id.clone(),
        }),
    }
}

/// Systems that appear in the corpus, sorted.
pub fn systems(instances: &[EvalInstance]) -> Vec<&str> {
    let set: HashSet<&str> = instances.iter().map(|i| i.system_id.as_str()).collect();
    let mut v: Vec<&str> = set.into_iter().collect();
    v.sort_unstable();
    v
}
