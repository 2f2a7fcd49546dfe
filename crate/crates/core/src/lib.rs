//! SMART: summarization evaluation by soft sentence matching.
//!
//! Candidate, reference and source texts are split into sentences and
//! compared sentence by sentence with a pluggable matching function. Three
//! variants turn the resulting match matrices into precision, recall and
//! F-measure:
//!
//! - SMART-1 and SMART-2 align single sentences and sentence bigrams,
//! - SMART-L runs a soft longest-common-subsequence over the sentences.
//!
//! ```
//! use smart_eval::matchers::{Builtin, ChrfParams};
//! use smart_eval::smart::smart_for_pair;
//! use smart_eval::textprep::{split_sentences, SplitMode};
//!
//! let reference = split_sentences("The cat sat on the mat. It was happy.", SplitMode::Rule);
//! let candidate = split_sentences("A happy cat. It sat on a mat.", SplitMode::Rule);
//! let mut chrf = Builtin::Chrf(ChrfParams::default());
//! let scores = smart_for_pair(&reference, &candidate, &mut chrf, None).unwrap();
//! for s in [scores.s1, scores.s2, scores.sl] {
//!     assert!((0.0..=1.0).contains(&s.fmeasure));
//! }
//! ```
//!
//! Model-based matchers run out of process behind [`bridge`]. The
//! [`metaeval`] module correlates metric scores with human judgments at the
//! system level.

pub mod bridge;
pub mod corpus;
mod error;
pub mod matchers;
pub mod metaeval;
pub mod runner;
pub mod smart;
pub mod textprep;

pub use error::Error;
pub use matchers::{Builtin, Matcher, MatcherKind, MatcherSpec};
pub use smart::{smart_for_pair, SmartScore, SmartTriple};
