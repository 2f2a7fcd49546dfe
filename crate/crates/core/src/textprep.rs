//! Sentence segmentation and tokenization shared by every matcher.
//!
//! Everything here operates on Unicode scalar values. No normalization is
//! applied, so the output is a pure function of the input string.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Abbreviations whose trailing period never ends a sentence (compared
/// case-insensitively against the word that carries the period).
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "vs.", "etc.", "e.g.", "i.e.", "u.s.", "u.k.",
];

const TERMINALS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}', '\u{bb}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '{', '\u{201c}', '\u{2018}', '\u{ab}'];

/// A single unit of matching: either real text or a padding sentinel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sentence {
    /// Blank sentence used to pad sequences for SMART-N with N >= 2.
    Blank,
    Text(Arc<str>),
}

impl Sentence {
    /// Wraps `text`. Empty text is not a valid sentence; use [`Sentence::Blank`].
    pub fn text(text: impl Into<Arc<str>>) -> Self {
        let text = text.into();
        debug_assert!(!text.is_empty(), "empty sentence text");
        Sentence::Text(text)
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Sentence::Blank)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Sentence::Blank => None,
            Sentence::Text(t) => Some(t),
        }
    }
}

/// An ordered list of sentences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceSeq {
    sentences: Vec<Sentence>,
}

impl SentenceSeq {
    /// Builds a sequence from raw strings, dropping entries that are empty
    /// after trimming.
    pub fn from_texts<I, S>(texts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sentences = texts
            .into_iter()
            .filter_map(|s| {
                let t = s.as_ref().trim();
                (!t.is_empty()).then(|| Sentence::text(t))
            })
            .collect();
        SentenceSeq { sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sentence> {
        self.sentences.iter()
    }

    pub fn as_slice(&self) -> &[Sentence] {
        &self.sentences
    }

    /// Returns a copy with `count` blank sentinels on both ends.
    pub fn padded(&self, count: usize) -> SentenceSeq {
        let mut sentences = Vec::with_capacity(self.len() + 2 * count);
        sentences.extend(std::iter::repeat_n(Sentence::Blank, count));
        sentences.extend(self.sentences.iter().cloned());
        sentences.extend(std::iter::repeat_n(Sentence::Blank, count));
        SentenceSeq { sentences }
    }

    /// Text of the non-blank sentences, in order.
    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().filter_map(Sentence::as_text)
    }
}

impl FromIterator<Sentence> for SentenceSeq {
    fn from_iter<T: IntoIterator<Item = Sentence>>(iter: T) -> Self {
        SentenceSeq {
            sentences: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a SentenceSeq {
    type Item = &'a Sentence;
    type IntoIter = std::slice::Iter<'a, Sentence>;

    fn into_iter(self) -> Self::IntoIter {
        self.sentences.iter()
    }
}

/// How raw text is cut into sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Punctuation-driven splitter with an abbreviation list.
    #[default]
    #[serde(alias = "rule_based")]
    Rule,
    /// One sentence per line.
    #[serde(alias = "pre_split_newline")]
    Newline,
}

impl FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rule" | "rule_based" => Ok(SplitMode::Rule),
            "newline" | "pre_split_newline" => Ok(SplitMode::Newline),
            other => Err(format!("unknown split mode `{other}` (expected rule|newline)")),
        }
    }
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitMode::Rule => "rule",
            SplitMode::Newline => "newline",
        })
    }
}

pub fn split_sentences(text: &str, mode: SplitMode) -> SentenceSeq {
    match mode {
        SplitMode::Newline => SentenceSeq::from_texts(text.split('\n')),
        SplitMode::Rule => SentenceSeq::from_texts(rule_based_spans(text)),
    }
}

/// Rule-based boundaries. A boundary follows a run of terminal marks
/// (plus any closing quotes/brackets) when whitespace comes next and either
///
/// * the next word starts with an uppercase letter or digit (optionally
///   behind an opening quote/bracket) and the word carrying the mark is not
///   a listed abbreviation, or
/// * the terminal run is detached from the previous word by whitespace, as in
///   pre-tokenized text ("... home . he slept .").
fn rule_based_spans(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let (_, c) = chars[i];
        if !TERMINALS.contains(&c) {
            i += 1;
            continue;
        }
        let run_start = i;
        let mut end = i + 1;
        while end < chars.len() && TERMINALS.contains(&chars[end].1) {
            end += 1;
        }
        while end < chars.len() && CLOSERS.contains(&chars[end].1) {
            end += 1;
        }
        // `end` is the first char after the terminal run.
        if end >= chars.len() || !chars[end].1.is_whitespace() {
            i = end.max(i + 1);
            continue;
        }
        let mut next = end;
        while next < chars.len() && chars[next].1.is_whitespace() {
            next += 1;
        }
        if next >= chars.len() {
            break;
        }

        let detached = run_start == 0 || chars[run_start - 1].1.is_whitespace();
        let boundary = if detached {
            true
        } else {
            starts_sentence(&chars[next..])
                && !(c == '.' && ends_with_abbreviation(text, start, chars[run_start].0 + 1))
        };

        if boundary {
            let cut = chars[end].0;
            spans.push(&text[start..cut]);
            start = chars[next].0;
        }
        i = next;
    }
    if start < text.len() {
        spans.push(&text[start..]);
    }
    spans
}

fn starts_sentence(rest: &[(usize, char)]) -> bool {
    let mut it = rest.iter().map(|&(_, c)| c).skip_while(|c| OPENERS.contains(c));
    matches!(it.next(), Some(c) if c.is_uppercase() || c.is_numeric())
}

/// Whether the whitespace-delimited word ending at byte `dot_end` (exclusive,
/// includes the period) is in the abbreviation list.
fn ends_with_abbreviation(text: &str, floor: usize, dot_end: usize) -> bool {
    let head = &text[floor..dot_end];
    let word = head
        .rsplit(|c: char| c.is_whitespace())
        .next()
        .unwrap_or(head)
        .trim_start_matches(|c: char| OPENERS.contains(&c));
    let word = word.to_lowercase();
    ABBREVIATIONS.iter().any(|a| *a == word)
}

/// Lowercased alphanumeric tokens. Every other character separates tokens.
///
/// Characters whose lowercase form is not a lowercase alphanumeric (for
/// instance a combining mark produced by case folding) also act as
/// separators, so no token ever holds uppercase or non-alphanumeric chars.
pub fn tokenize(sentence: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in sentence.chars() {
        if c.is_alphanumeric() {
            for lc in c.to_lowercase() {
                if lc.is_alphanumeric() && !lc.is_uppercase() {
                    current.push(lc);
                } else if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rule(text: &str) -> Vec<String> {
        split_sentences(text, SplitMode::Rule)
            .texts()
            .map(str::to_owned)
            .collect()
    }

    #[test]
    fn splits_two_plain_sentences() {
        assert_eq!(rule("A b. C d."), ["A b.", "C d."]);
    }

    #[test]
    fn newline_mode_splits_and_strips() {
        let seq = split_sentences("line1\nline2", SplitMode::Newline);
        assert_eq!(seq.texts().collect::<Vec<_>>(), ["line1", "line2"]);
        let seq = split_sentences("  a b \r\n\n c ", SplitMode::Newline);
        assert_eq!(seq.texts().collect::<Vec<_>>(), ["a b", "c"]);
    }

    #[test]
    fn abbreviations_do_not_split() {
        assert_eq!(
            rule("Mr. Smith went home. He slept."),
            ["Mr. Smith went home.", "He slept."]
        );
        assert_eq!(
            rule("Talks in the U.S. Senate stalled. Dr. Who left."),
            ["Talks in the U.S. Senate stalled.", "Dr. Who left."]
        );
    }

    #[test]
    fn lowercase_continuation_is_not_a_boundary() {
        assert_eq!(rule("It cost 3.5 dollars. then what?"), ["It cost 3.5 dollars. then what?"]);
    }

    #[test]
    fn detached_marks_split_tokenized_text() {
        assert_eq!(
            rule("paul merson was brought on . andros townsend scored !"),
            ["paul merson was brought on .", "andros townsend scored !"]
        );
    }

    #[test]
    fn quotes_and_runs_stay_with_sentence() {
        assert_eq!(
            rule("He said \"stop.\" Then he left?! 2 days later, nothing."),
            ["He said \"stop.\"", "Then he left?!", "2 days later, nothing."]
        );
    }

    #[test]
    fn empty_input_yields_empty_seq() {
        assert!(split_sentences("", SplitMode::Rule).is_empty());
        assert!(split_sentences("   \n ", SplitMode::Newline).is_empty());
    }

    #[test]
    fn padding_adds_blanks_on_both_ends() {
        let seq = SentenceSeq::from_texts(["a", "b"]).padded(1);
        assert_eq!(seq.len(), 4);
        assert!(seq.as_slice()[0].is_blank() && seq.as_slice()[3].is_blank());
        assert_eq!(seq.texts().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("The cat, sat!"), ["the", "cat", "sat"]);
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("state-of-the-art 2024"),
            ["state", "of", "the", "art", "2024"]
        );
        assert_eq!(tokenize("Ünïcödé ÉTÉ"), ["ünïcödé", "été"]);
    }

    proptest! {
        #[test]
        fn split_preserves_non_whitespace_content(text in "\\PC{0,200}") {
            for mode in [SplitMode::Rule, SplitMode::Newline] {
                let seq = split_sentences(&text, mode);
                let joined: String = seq.texts().collect::<String>().chars().filter(|c| !c.is_whitespace()).collect();
                let original: String = text.chars().filter(|c| !c.is_whitespace()).collect();
                prop_assert_eq!(joined, original);
                prop_assert!(seq.texts().all(|s| !s.is_empty()));
                prop_assert_eq!(split_sentences(&text, mode), seq);
            }
        }

        #[test]
        fn single_sentence_is_idempotent(words in proptest::collection::vec("[a-z]{1,8}", 1..10)) {
            let sentence = format!("{}.", words.join(" "));
            let seq = split_sentences(&sentence, SplitMode::Rule);
            prop_assert_eq!(seq.len(), 1);
            let again = split_sentences(seq.texts().next().unwrap(), SplitMode::Rule);
            prop_assert_eq!(again, seq);
        }

        #[test]
        fn tokens_are_lowercase_alphanumeric(text in "\\PC{0,100}") {
            let tokens = tokenize(&text);
            prop_assert_eq!(&tokens, &tokenize(&text));
            for t in tokens {
                prop_assert!(!t.is_empty());
                prop_assert!(t.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase()));
            }
        }
    }
}
