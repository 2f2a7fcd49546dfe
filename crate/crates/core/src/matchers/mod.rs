//! Sentence matching functions.
//!
//! A matcher maps a `(hypothesis, premise)` sentence pair to a score in
//! `[0, 1]`. The first argument is always the candidate-side text and the
//! second the grounding side, so directional matchers see a consistent
//! orientation. Padding sentinels never reach a matcher: a blank matches a
//! blank with 1 and anything else with 0.

mod bleu;
mod cache;
mod chrf;
mod rouge;

use std::fmt;
use std::str::FromStr;

pub use bleu::sentence_bleu;
pub use cache::PairCache;
pub use chrf::{chrf, chrf_with, ChrfParams};
pub use rouge::{lcs_len, rouge_l_f1, rouge_n_f1};

use crate::bridge::{BridgeClient, BridgeConfig};
use crate::textprep::{tokenize, Sentence};
use crate::Error;

/// Scores batches of non-blank sentence pairs.
pub trait Matcher: Send {
    /// Upper-case label used in metric names, e.g. `CHRF` in `S1-CHRF`.
    fn label(&self) -> String;

    /// True when `score(a, b) == score(b, a)` for all inputs.
    fn is_symmetric(&self) -> bool {
        false
    }

    /// One score per `(hyp, prem)` pair, in order. Values outside `[0, 1]`
    /// are clamped by the caller.
    fn score_pairs(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, Error>;
}

impl<M: Matcher + ?Sized> Matcher for Box<M> {
    fn label(&self) -> String {
        (**self).label()
    }

    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }

    fn score_pairs(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, Error> {
        (**self).score_pairs(pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatcherKind {
    Rouge1,
    Rouge2,
    RougeL,
    Bleu,
    Chrf,
    External,
}

impl MatcherKind {
    pub const ALL: [MatcherKind; 6] = [
        MatcherKind::Rouge1,
        MatcherKind::Rouge2,
        MatcherKind::RougeL,
        MatcherKind::Bleu,
        MatcherKind::Chrf,
        MatcherKind::External,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatcherKind::Rouge1 => "rouge1",
            MatcherKind::Rouge2 => "rouge2",
            MatcherKind::RougeL => "rougeL",
            MatcherKind::Bleu => "bleu",
            MatcherKind::Chrf => "chrf",
            MatcherKind::External => "external",
        }
    }
}

impl fmt::Display for MatcherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatcherKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MatcherKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown matcher `{s}` (expected rouge1|rouge2|rougeL|bleu|chrf|external)"
                ))
            })
    }
}

/// String-based matchers computed in-process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Rouge1,
    Rouge2,
    RougeL,
    Bleu,
    Chrf(ChrfParams),
}

impl Builtin {
    pub fn kind(&self) -> MatcherKind {
        match self {
            Builtin::Rouge1 => MatcherKind::Rouge1,
            Builtin::Rouge2 => MatcherKind::Rouge2,
            Builtin::RougeL => MatcherKind::RougeL,
            Builtin::Bleu => MatcherKind::Bleu,
            Builtin::Chrf(_) => MatcherKind::Chrf,
        }
    }

    /// Score of hypothesis `a` against premise `b`.
    pub fn score(&self, a: &str, b: &str) -> f64 {
        match self {
            Builtin::Rouge1 => rouge_n_f1(&tokenize(a), &tokenize(b), 1),
            Builtin::Rouge2 => rouge_n_f1(&tokenize(a), &tokenize(b), 2),
            Builtin::RougeL => rouge_l_f1(&tokenize(a), &tokenize(b)),
            Builtin::Bleu => sentence_bleu(&tokenize(a), &tokenize(b)),
            Builtin::Chrf(params) => chrf_with(a, b, *params),
        }
    }
}

impl Matcher for Builtin {
    fn label(&self) -> String {
        match self {
            Builtin::Rouge1 => "ROUGE1",
            Builtin::Rouge2 => "ROUGE2",
            Builtin::RougeL => "ROUGEL",
            Builtin::Bleu => "BLEU",
            Builtin::Chrf(_) => "CHRF",
        }
        .to_owned()
    }

    fn is_symmetric(&self) -> bool {
        matches!(self, Builtin::Rouge1 | Builtin::Rouge2 | Builtin::RougeL)
    }

    fn score_pairs(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<f64>, Error> {
        Ok(pairs.iter().map(|(a, b)| self.score(a, b)).collect())
    }
}

/// Which matcher a scoring run uses, fixed for the whole run.
#[derive(Debug, Clone, PartialEq)]
pub enum MatcherSpec {
    Builtin(Builtin),
    External(BridgeConfig),
}

impl MatcherSpec {
    pub fn builtin(kind: MatcherKind) -> Result<Self, Error> {
        let builtin = match kind {
            MatcherKind::Rouge1 => Builtin::Rouge1,
            MatcherKind::Rouge2 => Builtin::Rouge2,
            MatcherKind::RougeL => Builtin::RougeL,
            MatcherKind::Bleu => Builtin::Bleu,
            MatcherKind::Chrf => Builtin::Chrf(ChrfParams::default()),
            MatcherKind::External => {
                return Err(Error::Config(
                    "the external matcher needs a bridge command".into(),
                ))
            }
        };
        Ok(MatcherSpec::Builtin(builtin))
    }

    pub fn external(config: BridgeConfig) -> Result<Self, Error> {
        config.validate()?;
        Ok(MatcherSpec::External(config))
    }

    pub fn kind(&self) -> MatcherKind {
        match self {
            MatcherSpec::Builtin(b) => b.kind(),
            MatcherSpec::External(_) => MatcherKind::External,
        }
    }

    pub fn label(&self) -> String {
        match self {
            MatcherSpec::Builtin(b) => b.label(),
            MatcherSpec::External(cfg) => cfg.label.clone(),
        }
    }

    /// Creates a matcher instance. For external matchers this starts a new
    /// bridge process, so each scoring worker should call it once.
    pub fn instantiate(&self) -> Result<Box<dyn Matcher>, Error> {
        match self {
            MatcherSpec::Builtin(b) => Ok(Box::new(*b)),
            MatcherSpec::External(cfg) => Ok(Box::new(BridgeClient::spawn(cfg)?)),
        }
    }
}

/// Score for a sentence pair that involves a padding sentinel, if any.
pub fn blank_rule(a: &Sentence, b: &Sentence) -> Option<f64> {
    match (a.is_blank(), b.is_blank()) {
        (true, true) => Some(1.0),
        (true, false) | (false, true) => Some(0.0),
        (false, false) => None,
    }
}

/// Clamps a raw matcher output into `[0, 1]`, rejecting NaN.
pub fn clamp_score(value: f64, label: &str) -> Result<f64, Error> {
    if value.is_nan() {
        return Err(Error::NonFiniteScore {
            matcher: label.to_owned(),
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Scores one sentence pair.
pub fn match_pair<M: Matcher + ?Sized>(matcher: &mut M, a: &Sentence, b: &Sentence) -> Result<f64, Error> {
    if let Some(v) = blank_rule(a, b) {
        return Ok(v);
    }
    let (Some(ta), Some(tb)) = (a.as_text(), b.as_text()) else {
        unreachable!("blank_rule handles sentinels")
    };
    let raw = matcher.score_pairs(&[(ta, tb)])?;
    let label = matcher.label();
    let value = raw
        .first()
        .copied()
        .ok_or_else(|| Error::Matcher(format!("{label} returned no score")))?;
    clamp_score(value, &label)
}
