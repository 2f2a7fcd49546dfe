//! A minimal matcher server speaking the bridge protocol.
//!
//! Used by tests, by the examples and by `smart bridge-stub`. Real model
//! servers implement the same loop in whatever language hosts the model.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde_json::Value;

use super::{BridgeRequest, BridgeResponse};
use crate::matchers::chrf;

/// Deterministic scorers for testing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StubScorer {
    /// 1.0 for identical strings, 0.0 otherwise.
    Identity,
    /// The in-process chrF matcher.
    Chrf,
    /// Dice coefficient of character trigram sets.
    TrigramDice,
    /// Always the given value, possibly outside `[0, 1]`.
    Constant(f64),
}

impl StubScorer {
    pub fn score(&self, hyp: &str, prem: &str) -> f64 {
        match self {
            StubScorer::Identity => f64::from(u8::from(hyp == prem)),
            StubScorer::Chrf => chrf(hyp, prem),
            StubScorer::TrigramDice => trigram_dice(hyp, prem),
            StubScorer::Constant(v) => *v,
        }
    }

    pub fn into_fn(self) -> impl FnMut(&str, &str) -> Result<f64, String> + Send + 'static {
        move |h, p| Ok(self.score(h, p))
    }
}

impl FromStr for StubScorer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(StubScorer::Identity),
            "chrf" => Ok(StubScorer::Chrf),
            "dice" | "trigram-dice" => Ok(StubScorer::TrigramDice),
            other => match other.strip_prefix("constant:") {
                Some(v) => v
                    .parse()
                    .map(StubScorer::Constant)
                    .map_err(|e| format!("bad constant `{v}`: {e}")),
                None => Err(format!(
                    "unknown stub scorer `{other}` (expected identity|chrf|dice|constant:<v>)"
                )),
            },
        }
    }
}

fn trigram_dice(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    let grams = |s: &str| -> HashSet<Vec<char>> {
        let chars: Vec<char> = s.chars().collect();
        chars.windows(3).map(<[char]>::to_vec).collect()
    };
    let (ga, gb) = (grams(a), grams(b));
    if ga.is_empty() || gb.is_empty() {
        return 0.0;
    }
    2.0 * ga.intersection(&gb).count() as f64 / (ga.len() + gb.len()) as f64
}

/// Answers requests from `reader` until it is exhausted.
///
/// Malformed lines get an error response carrying the request id when one
/// can be read, else -1. A scorer failure turns the whole batch into an
/// error response; the loop then continues with the next request.
pub fn serve<R, W, F>(reader: R, mut writer: W, mut scorer: F) -> io::Result<()>
where
    R: BufRead,
    W: Write,
    F: FnMut(&str, &str) -> Result<f64, String>,
{
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = respond(&line, &mut scorer);
        let mut out = serde_json::to_string(&response).expect("response serializes");
        out.push('\n');
        writer.write_all(out.as_bytes())?;
        writer.flush()?;
    }
    Ok(())
}

fn respond<F>(line: &str, scorer: &mut F) -> BridgeResponse
where
    F: FnMut(&str, &str) -> Result<f64, String>,
{
    let error = |id: i64, error: String| BridgeResponse::Error { id, error };
    let value: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return error(-1, format!("malformed request: {e}")),
    };
    let id = value.get("id").and_then(Value::as_i64).unwrap_or(-1);
    let request: BridgeRequest = match serde_json::from_value(value) {
        Ok(r) => r,
        Err(e) => return error(id, format!("malformed request: {e}")),
    };
    if request.pairs.is_empty() {
        return error(id, "request has no pairs".into());
    }
    let mut scores = Vec::with_capacity(request.pairs.len());
    for pair in &request.pairs {
        match scorer(&pair.hyp, &pair.prem) {
            Ok(v) => scores.push(v),
            Err(e) => return error(id, e),
        }
    }
    BridgeResponse::Scores { id, scores }
}
