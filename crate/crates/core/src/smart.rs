//! The SMART metric family.
//!
//! Candidate `C` and grounding text `R` (a reference summary or the source
//! document) are compared sentence by sentence through a soft matcher:
//!
//! * SMART-N aligns consecutive sentence windows of size N by their best
//!   average match. For N >= 2 both sequences get N-1 blank sentinels on
//!   each end.
//! * SMART-L is a soft longest common subsequence over sentences where a
//!   grounding sentence may be reused by consecutive candidate sentences.
//!
//! Precision and recall use separately built matrices because a directional
//! matcher makes `match(c, r) != match(r, c)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::matchers::{blank_rule, clamp_score, Matcher, PairCache};
use crate::textprep::{Sentence, SentenceSeq};
use crate::Error;

/// Row-major grid of match scores. Entry `(i, j)` is `match(a[i], b[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchMatrix {
    rows: usize,
    cols: usize,
    scores: Vec<f64>,
}

impl MatchMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatchMatrix {
            rows,
            cols,
            scores: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from nested rows. Fails on ragged input or on values
    /// outside `[0, 1]`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, Error> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut scores = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Matrix(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Matrix(format!("entry {v} in row {i} is outside [0, 1]")));
            }
            scores.extend_from_slice(row);
        }
        Ok(MatchMatrix {
            rows: rows.len(),
            cols,
            scores,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut scores = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                scores.push(f(i, j).clamp(0.0, 1.0));
            }
        }
        MatchMatrix { rows, cols, scores }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.scores[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.scores[row * self.cols..(row + 1) * self.cols]
    }

    pub fn transpose(&self) -> MatchMatrix {
        MatchMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// The matrix of the same two sequences after adding `count` blank
    /// sentinels at both ends of each, filled with the blank match rules.
    pub fn padded(&self, count: usize) -> MatchMatrix {
        let blank = Sentence::Blank;
        let text = Sentence::text("-");
        MatchMatrix::from_fn(self.rows + 2 * count, self.cols + 2 * count, |i, j| {
            let row_pad = i < count || i >= self.rows + count;
            let col_pad = j < count || j >= self.cols + count;
            match (row_pad, col_pad) {
                (false, false) => self.get(i - count, j - count),
                (r, c) => {
                    let a = if r { &blank } else { &text };
                    let b = if c { &blank } else { &text };
                    blank_rule(a, b).expect("at least one side is blank")
                }
            }
        })
    }
}

/// Fills `(i, j)` with `match(a[i], b[j])`.
///
/// Identical pairs are scored once. With a cache, previously seen pairs are
/// not sent to the matcher at all; the matcher receives every missing pair in
/// a single call so external matchers can batch them.
pub fn build_match_matrix<M: Matcher + ?Sized>(
    a: &SentenceSeq,
    b: &SentenceSeq,
    matcher: &mut M,
    cache: Option<&PairCache>,
) -> Result<MatchMatrix, Error> {
    let (rows, cols) = (a.len(), b.len());
    let mut scores = vec![0.0; rows * cols];
    let mut pending: HashMap<(&Arc<str>, &Arc<str>), Vec<usize>> = HashMap::new();
    let mut order: Vec<(&Arc<str>, &Arc<str>)> = Vec::new();

    for (i, sa) in a.iter().enumerate() {
        for (j, sb) in b.iter().enumerate() {
            let idx = i * cols + j;
            if let Some(v) = blank_rule(sa, sb) {
                scores[idx] = v;
                continue;
            }
            let (Sentence::Text(ta), Sentence::Text(tb)) = (sa, sb) else {
                unreachable!()
            };
            if let Some(v) = cache.and_then(|c| c.get(ta, tb)) {
                scores[idx] = v;
                continue;
            }
            pending
                .entry((ta, tb))
                .or_insert_with(|| {
                    order.push((ta, tb));
                    Vec::new()
                })
                .push(idx);
        }
    }

    if !order.is_empty() {
        let pairs: Vec<(&str, &str)> = order.iter().map(|(x, y)| (&***x, &***y)).collect();
        let raw = matcher.score_pairs(&pairs)?;
        let label = matcher.label();
        if raw.len() != pairs.len() {
            return Err(Error::Matcher(format!(
                "{label} returned {} scores for {} pairs",
                raw.len(),
                pairs.len()
            )));
        }
        for (key, value) in order.iter().zip(raw) {
            let mut value = clamp_score(value, &label)?;
            if let Some(c) = cache {
                value = c.insert(Arc::clone(key.0), Arc::clone(key.1), value);
            }
            for &idx in &pending[key] {
                scores[idx] = value;
            }
        }
    }
    Ok(MatchMatrix { rows, cols, scores })
}

/// Precision, recall and F-measure of one SMART variant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SmartScore {
    #[serde(rename = "p")]
    pub precision: f64,
    #[serde(rename = "r")]
    pub recall: f64,
    #[serde(rename = "f")]
    pub fmeasure: f64,
}

impl SmartScore {
    pub const ZERO: SmartScore = SmartScore {
        precision: 0.0,
        recall: 0.0,
        fmeasure: 0.0,
    };

    /// F is the harmonic mean of P and R, or 0 when both are 0.
    pub fn from_precision_recall(precision: f64, recall: f64) -> Self {
        let fmeasure = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        SmartScore {
            precision,
            recall,
            fmeasure,
        }
    }

    pub fn get(&self, field: ReportField) -> f64 {
        match field {
            ReportField::F => self.fmeasure,
            ReportField::P => self.precision,
            ReportField::R => self.recall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    S1,
    S2,
    SL,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::S1, Variant::S2, Variant::SL];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::S1 => "S1",
            Variant::S2 => "S2",
            Variant::SL => "SL",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "S1" | "s1" => Ok(Variant::S1),
            "S2" | "s2" => Ok(Variant::S2),
            "SL" | "sl" | "Sl" => Ok(Variant::SL),
            other => Err(Error::Config(format!("unknown variant `{other}` (expected S1|S2|SL)"))),
        }
    }
}

/// Metric name following the `S[1|2|L|X]-<MATCHER>` template.
pub fn metric_name(variant: &str, matcher_label: &str) -> String {
    format!("{variant}-{matcher_label}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportField {
    #[default]
    F,
    P,
    R,
}

impl FromStr for ReportField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f" | "fmeasure" => Ok(ReportField::F),
            "p" | "precision" => Ok(ReportField::P),
            "r" | "recall" => Ok(ReportField::R),
            other => Err(Error::Config(format!("unknown report field `{other}` (expected f|p|r)"))),
        }
    }
}

/// How SMART(S, C) and SMART(R, C) are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceRefMode {
    #[default]
    Max,
    Average,
    Minimum,
    RefOnly,
    SrcOnly,
}

impl SourceRefMode {
    pub fn uses_source(self) -> bool {
        !matches!(self, SourceRefMode::RefOnly)
    }

    pub fn uses_references(self) -> bool {
        !matches!(self, SourceRefMode::SrcOnly)
    }
}

impl FromStr for SourceRefMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(SourceRefMode::Max),
            "average" | "avg" => Ok(SourceRefMode::Average),
            "minimum" | "min" => Ok(SourceRefMode::Minimum),
            "ref-only" | "ref_only" => Ok(SourceRefMode::RefOnly),
            "src-only" | "src_only" => Ok(SourceRefMode::SrcOnly),
            other => Err(Error::Config(format!(
                "unknown aggregation `{other}` (expected max|average|minimum|ref-only|src-only)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AggregationPolicy {
    pub source_ref_mode: SourceRefMode,
    pub report: ReportField,
}

/// SMART-N from a candidate-first matrix (`|C| x |R|`) and a
/// reference-first matrix (`|R| x |C|`).
///
/// Padding is the caller's job: for `n >= 2` pass matrices built over padded
/// sequences (see [`MatchMatrix::padded`]).
pub fn smart_n(m_prec: &MatchMatrix, m_rec: &MatchMatrix, n: usize) -> SmartScore {
    assert!(n >= 1, "SMART-N needs n >= 1");
    assert_eq!(
        (m_prec.rows(), m_prec.cols()),
        (m_rec.cols(), m_rec.rows()),
        "precision and recall matrices must be transposed in shape"
    );
    if m_prec.rows() < n || m_prec.cols() < n {
        return SmartScore::ZERO;
    }
    let precision = best_window_mean(m_prec, n);
    let recall = best_window_mean(m_rec, n);
    SmartScore::from_precision_recall(precision, recall)
}

/// For each row window, the best diagonal window average over columns;
/// returns the mean of these maxima.
fn best_window_mean(m: &MatchMatrix, n: usize) -> f64 {
    let row_windows = m.rows() - n + 1;
    let col_windows = m.cols() - n + 1;
    let mut total = 0.0;
    for j in 0..row_windows {
        let mut best = f64::NEG_INFINITY;
        for i in 0..col_windows {
            let mut window = 0.0;
            for k in 0..n {
                window += m.get(j + k, i + k);
            }
            best = best.max(window / n as f64);
        }
        total += best;
    }
    total / row_windows as f64
}

/// Soft longest common subsequence of the rows against the columns of `m`.
///
/// `lcs[i][j] = max(lcs[i-1][j-1] + m, lcs[i-1][j] + m, lcs[i][j-1])` with
/// `m = M[i-1][j-1]` and a zero first row and column. Every row sentence is
/// matched to one column sentence with non-decreasing column index, so a
/// column may absorb several consecutive rows.
pub fn soft_lcs(m: &MatchMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let cols = m.cols();
    let mut prev = vec![0.0f64; cols + 1];
    let mut cur = vec![0.0f64; cols + 1];
    for i in 0..m.rows() {
        let row = m.row(i);
        cur[0] = 0.0;
        for j in 1..=cols {
            let s = row[j - 1];
            cur[j] = (prev[j - 1] + s).max(prev[j] + s).max(cur[j - 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[cols]
}

/// SMART-L from unpadded candidate-first and reference-first matrices.
pub fn smart_l(m_prec: &MatchMatrix, m_rec: &MatchMatrix) -> SmartScore {
    let (c_len, r_len) = (m_prec.rows(), m_prec.cols());
    assert_eq!((c_len, r_len), (m_rec.cols(), m_rec.rows()));
    if c_len == 0 || r_len == 0 {
        return SmartScore::ZERO;
    }
    let precision = soft_lcs(m_prec) / c_len as f64;
    let recall = soft_lcs(m_rec) / r_len as f64;
    SmartScore::from_precision_recall(precision, recall)
}

/// The three shipped variants for one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SmartTriple {
    #[serde(rename = "S1")]
    pub s1: SmartScore,
    #[serde(rename = "S2")]
    pub s2: SmartScore,
    #[serde(rename = "SL")]
    pub sl: SmartScore,
}

impl SmartTriple {
    pub const ZERO: SmartTriple = SmartTriple {
        s1: SmartScore::ZERO,
        s2: SmartScore::ZERO,
        sl: SmartScore::ZERO,
    };

    pub fn get(&self, variant: Variant) -> SmartScore {
        match variant {
            Variant::S1 => self.s1,
            Variant::S2 => self.s2,
            Variant::SL => self.sl,
        }
    }

    pub fn smart_x(&self, field: ReportField) -> f64 {
        smart_x(self.s1.get(field), self.s2.get(field), self.sl.get(field))
    }

    fn zip_with(&self, other: &SmartTriple, f: impl Fn(SmartScore, SmartScore) -> SmartScore) -> SmartTriple {
        SmartTriple {
            s1: f(self.s1, other.s1),
            s2: f(self.s2, other.s2),
            sl: f(self.sl, other.sl),
        }
    }
}

/// SMART-1, SMART-2 and SMART-L of `candidate` against one grounding text.
///
/// Only SMART-2 sees padded sequences. Returns all zeros when either side has
/// no sentences.
pub fn smart_for_pair<M: Matcher + ?Sized>(
    grounding: &SentenceSeq,
    candidate: &SentenceSeq,
    matcher: &mut M,
    cache: Option<&PairCache>,
) -> Result<SmartTriple, Error> {
    if grounding.is_empty() || candidate.is_empty() {
        return Ok(SmartTriple::ZERO);
    }
    let m_prec = build_match_matrix(candidate, grounding, matcher, cache)?;
    let m_rec = if matcher.is_symmetric() {
        m_prec.transpose()
    } else {
        build_match_matrix(grounding, candidate, matcher, cache)?
    };
    Ok(SmartTriple {
        s1: smart_n(&m_prec, &m_rec, 1),
        s2: smart_n(&m_prec.padded(1), &m_rec.padded(1), 2),
        sl: smart_l(&m_prec, &m_rec),
    })
}

/// Element with the largest `field` (first one on ties).
pub fn aggregate_by(scores: &[SmartScore], field: ReportField) -> Option<SmartScore> {
    let mut iter = scores.iter();
    let mut best = *iter.next()?;
    for s in iter {
        if s.get(field) > best.get(field) {
            best = *s;
        }
    }
    Some(best)
}

/// Multi-reference aggregation: the score with the highest F-measure.
pub fn aggregate_references(per_ref: &[SmartScore]) -> Option<SmartScore> {
    aggregate_by(per_ref, ReportField::F)
}

/// Combines the source-based and reference-based scores of one variant.
/// Selection modes compare `policy.report` and prefer the source on ties.
pub fn aggregate_source_reference(
    score_src: SmartScore,
    score_ref: SmartScore,
    policy: AggregationPolicy,
) -> SmartScore {
    let field = policy.report;
    match policy.source_ref_mode {
        SourceRefMode::Max => {
            if score_ref.get(field) > score_src.get(field) {
                score_ref
            } else {
                score_src
            }
        }
        SourceRefMode::Minimum => {
            if score_ref.get(field) < score_src.get(field) {
                score_ref
            } else {
                score_src
            }
        }
        SourceRefMode::Average => SmartScore {
            precision: (score_src.precision + score_ref.precision) / 2.0,
            recall: (score_src.recall + score_ref.recall) / 2.0,
            fmeasure: (score_src.fmeasure + score_ref.fmeasure) / 2.0,
        },
        SourceRefMode::RefOnly => score_ref,
        SourceRefMode::SrcOnly => score_src,
    }
}

/// Variant-wise [`aggregate_source_reference`].
pub fn aggregate_triples(src: &SmartTriple, reference: &SmartTriple, policy: AggregationPolicy) -> SmartTriple {
    src.zip_with(reference, |s, r| aggregate_source_reference(s, r, policy))
}

/// Variant-wise reference aggregation by `field`.
pub fn aggregate_reference_triples(per_ref: &[SmartTriple], field: ReportField) -> Option<SmartTriple> {
    let pick = |v: Variant| {
        let scores: Vec<SmartScore> = per_ref.iter().map(|t| t.get(v)).collect();
        aggregate_by(&scores, field)
    };
    Some(SmartTriple {
        s1: pick(Variant::S1)?,
        s2: pick(Variant::S2)?,
        sl: pick(Variant::SL)?,
    })
}

/// SMART-X: mean of the SMART-1, SMART-2 and SMART-L values.
pub fn smart_x(s1: f64, s2: f64, sl: f64) -> f64 {
    (s1 + s2 + sl) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchers::Builtin;

    fn matrix(rows: &[&[f64]]) -> MatchMatrix {
        MatchMatrix::from_rows(rows).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    /// Returns 1 for identical text, 0 otherwise.
    struct Exact;

    impl Matcher for Exact {
        fn label(&self) -> String {
            "EXACT".into()
        }
        fn is_symmetric(&self) -> bool {
            true
        }
        fn score_pairs(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, Error> {
            Ok(pairs.iter().map(|(a, b)| f64::from(u8::from(a == b))).collect())
        }
    }

    /// Looks scores up in a fixed table keyed by (hyp, prem).
    struct Table(HashMap<(String, String), f64>, usize);

    impl Matcher for Table {
        fn label(&self) -> String {
            "TABLE".into()
        }
        fn score_pairs(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, Error> {
            self.1 += pairs.len();
            Ok(pairs
                .iter()
                .map(|(a, b)| *self.0.get(&(a.to_string(), b.to_string())).unwrap_or(&0.0))
                .collect())
        }
    }

    /// Symmetric table for C = [c1, c2], R = [r1, r2, r3].
    fn worked_table() -> Table {
        let m = [[0.5, 0.2, 0.9], [0.1, 0.7, 0.3]];
        let mut t = HashMap::new();
        for (j, row) in m.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                t.insert((format!("c{}", j + 1), format!("r{}", i + 1)), *v);
                t.insert((format!("r{}", i + 1), format!("c{}", j + 1)), *v);
            }
        }
        Table(t, 0)
    }

    #[test]
    fn matrix_examples() {
        let s = SentenceSeq::from_texts(["s"]);
        assert_eq!(build_match_matrix(&s, &s, &mut Exact, None).unwrap(), matrix(&[&[1.0]]));
        let a = SentenceSeq::from_texts(["x"]);
        let b = SentenceSeq::from_texts(["y", "z"]);
        assert_eq!(build_match_matrix(&a, &b, &mut Exact, None).unwrap(), matrix(&[&[0.0, 0.0]]));
    }

    #[test]
    fn matrix_dedups_and_uses_cache() {
        let a = SentenceSeq::from_texts(["c1", "c1", "c2"]);
        let b = SentenceSeq::from_texts(["r1", "r3"]);
        let mut t = worked_table();
        let cache = PairCache::new();
        let m = build_match_matrix(&a, &b, &mut t, Some(&cache)).unwrap();
        assert_eq!(m, matrix(&[&[0.5, 0.9], &[0.5, 0.9], &[0.1, 0.3]]));
        assert_eq!(t.1, 4);
        let again = build_match_matrix(&a, &b, &mut t, Some(&cache)).unwrap();
        assert_eq!(again, m);
        assert_eq!(t.1, 4);
    }

    #[test]
    fn from_rows_validates() {
        assert!(MatchMatrix::from_rows(&[vec![0.1, 0.2], vec![0.3]]).is_err());
        assert!(MatchMatrix::from_rows(&[vec![1.5]]).is_err());
        assert_eq!(MatchMatrix::from_rows::<Vec<f64>>(&[]).unwrap().rows(), 0);
    }

    #[test]
    fn padding_follows_blank_rules() {
        let m = matrix(&[&[0.4]]).padded(1);
        assert_eq!(
            m,
            matrix(&[&[1.0, 0.0, 1.0], &[0.0, 0.4, 0.0], &[1.0, 0.0, 1.0]])
        );
    }

    #[test]
    fn smart1_identical_single_sentence() {
        let m = matrix(&[&[1.0]]);
        assert_eq!(smart_n(&m, &m, 1), SmartScore::from_precision_recall(1.0, 1.0));
    }

    #[test]
    fn smart1_worked_example() {
        let m_prec = matrix(&[&[0.5, 0.2, 0.9], &[0.1, 0.7, 0.3]]);
        let s = smart_n(&m_prec, &m_prec.transpose(), 1);
        assert!(close(s.precision, 0.8));
        assert!(close(s.recall, 0.7));
        assert!(close(s.fmeasure, 2.0 * 0.8 * 0.7 / 1.5));
        assert!((s.fmeasure - 0.74667).abs() < 5e-6);
    }

    #[test]
    fn smart1_from_sentences_matches_worked_example() {
        let c = SentenceSeq::from_texts(["c1", "c2"]);
        let r = SentenceSeq::from_texts(["r1", "r2", "r3"]);
        let t = smart_for_pair(&r, &c, &mut worked_table(), None).unwrap();
        assert!(close(t.s1.precision, 0.8) && close(t.s1.recall, 0.7));
    }

    #[test]
    fn smart2_identical_two_sentences() {
        let c = SentenceSeq::from_texts(["a", "b"]);
        let t = smart_for_pair(&c, &c, &mut Exact, None).unwrap();
        assert_eq!(t.s2.fmeasure, 1.0);
        assert_eq!(t.s1.fmeasure, 1.0);
        assert_eq!(t.sl.fmeasure, 1.0);
    }

    #[test]
    fn smart2_without_enough_sentences_is_zero() {
        let m = matrix(&[&[0.7]]);
        assert_eq!(smart_n(&m, &m, 2), SmartScore::ZERO);
    }

    #[test]
    fn smart2_single_sentence_is_affine_in_match() {
        for m in [0.0, 0.3, 0.55, 1.0] {
            let mm = matrix(&[&[m]]);
            let s2 = smart_n(&mm.padded(1), &mm.padded(1), 2);
            assert!(close(s2.precision, (1.0 + m) / 2.0));
            assert!(close(s2.recall, (1.0 + m) / 2.0));
        }
    }

    #[test]
    fn soft_lcs_examples() {
        assert_eq!(soft_lcs(&matrix(&[&[1.0, 0.0], &[0.0, 1.0]])), 2.0);
        assert_eq!(soft_lcs(&MatchMatrix::zeros(3, 4)), 0.0);
        assert_eq!(soft_lcs(&MatchMatrix::zeros(0, 4)), 0.0);
        let m = matrix(&[&[0.9, 0.1], &[0.2, 0.8], &[0.3, 0.4]]);
        assert!(close(soft_lcs(&m), 2.1));
        // transpose: c1 <- r1 (0.9), c2 <- r2 (0.8), c3 unused -> 1.7
        assert!(close(soft_lcs(&m.transpose()), 1.7));
    }

    #[test]
    fn smart_l_examples() {
        let m = matrix(&[&[0.9, 0.1], &[0.2, 0.8], &[0.3, 0.4]]);
        let s = smart_l(&m, &m.transpose());
        assert!(close(s.precision, 0.7));
        assert!(close(s.recall, 0.85));
        let single = matrix(&[&[0.35]]);
        let s = smart_l(&single, &single);
        assert_eq!((s.precision, s.recall), (0.35, 0.35));
        assert!(close(s.fmeasure, 0.35));
    }

    #[test]
    fn empty_sides_give_zero() {
        let empty = SentenceSeq::default();
        let r = SentenceSeq::from_texts(["a"]);
        assert_eq!(smart_for_pair(&r, &empty, &mut Exact, None).unwrap(), SmartTriple::ZERO);
        assert_eq!(smart_for_pair(&empty, &r, &mut Exact, None).unwrap(), SmartTriple::ZERO);
    }

    #[test]
    fn directional_matcher_builds_both_matrices() {
        let c = SentenceSeq::from_texts(["the cat"]);
        let r = SentenceSeq::from_texts(["the cat sat on the mat"]);
        let mut bleu = Builtin::Bleu;
        let t = smart_for_pair(&r, &c, &mut bleu, None).unwrap();
        assert_eq!(t.s1.precision, bleu.score("the cat", "the cat sat on the mat"));
        assert_eq!(t.s1.recall, bleu.score("the cat sat on the mat", "the cat"));
    }

    #[test]
    fn reference_aggregation() {
        let s = |f| SmartScore { precision: f, recall: f, fmeasure: f };
        assert_eq!(aggregate_references(&[s(0.3), s(0.8), s(0.5)]), Some(s(0.8)));
        assert_eq!(aggregate_references(&[s(0.3)]), Some(s(0.3)));
        assert_eq!(aggregate_references(&[]), None);
        let first = SmartScore { precision: 0.1, recall: 0.9, fmeasure: 0.5 };
        let second = SmartScore { precision: 0.9, recall: 0.1, fmeasure: 0.5 };
        assert_eq!(aggregate_references(&[first, second]), Some(first));
    }

    #[test]
    fn source_reference_modes() {
        let s = |f| SmartScore { precision: f, recall: f, fmeasure: f };
        let policy = |mode| AggregationPolicy { source_ref_mode: mode, report: ReportField::F };
        assert_eq!(aggregate_source_reference(s(0.4), s(0.6), policy(SourceRefMode::Max)), s(0.6));
        assert_eq!(aggregate_source_reference(s(0.4), s(0.6), policy(SourceRefMode::Average)), s(0.5));
        assert_eq!(aggregate_source_reference(s(0.4), s(0.6), policy(SourceRefMode::Minimum)), s(0.4));
        assert_eq!(aggregate_source_reference(s(0.9), s(0.4), policy(SourceRefMode::RefOnly)), s(0.4));
        assert_eq!(aggregate_source_reference(s(0.9), s(0.4), policy(SourceRefMode::SrcOnly)), s(0.9));
        let by_recall = AggregationPolicy { source_ref_mode: SourceRefMode::Max, report: ReportField::R };
        let hi_p = SmartScore { precision: 0.9, recall: 0.1, fmeasure: 0.18 };
        let hi_r = SmartScore { precision: 0.2, recall: 0.6, fmeasure: 0.3 };
        assert_eq!(aggregate_source_reference(hi_p, hi_r, by_recall), hi_r);
    }

    #[test]
    fn smart_x_examples() {
        assert_eq!(smart_x(1.0, 1.0, 1.0), 1.0);
        assert_eq!(smart_x(0.0, 0.0, 0.0), 0.0);
        assert!(close(smart_x(0.3, 0.6, 0.9), 0.6));
    }

    #[test]
    fn names_follow_template() {
        assert_eq!(metric_name(Variant::S1.as_str(), "CHRF"), "S1-CHRF");
        assert_eq!(metric_name("SX", "BLEURT"), "SX-BLEURT");
        assert_eq!("sl".parse::<Variant>().unwrap(), Variant::SL);
        assert!("S3".parse::<Variant>().is_err());
    }
}
