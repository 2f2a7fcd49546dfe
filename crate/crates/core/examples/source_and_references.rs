//! Multiple references plus the source document.
//!
//! Each reference is scored separately and the best one is kept; the result
//! is then combined with the source-based score under each aggregation mode.

use smart_eval::matchers::{Builtin, ChrfParams};
use smart_eval::smart::{
    aggregate_reference_triples, aggregate_triples, smart_for_pair, AggregationPolicy, ReportField, SmartTriple,
    SourceRefMode,
};
use smart_eval::textprep::{split_sentences, SplitMode};

fn main() {
    let source = "Scientists found a new species of frog in the rainforest. The frog is smaller than a coin. \
                  It was discovered by its unusual call. Researchers fear logging threatens its habitat.";
    let references = [
        "A tiny new frog species was found in the rainforest. Logging may threaten it.",
        "Researchers discovered a coin-sized frog by its call.",
    ];
    let candidate = "A frog smaller than a coin was found. Its unusual call gave it away.";

    let split = |t: &str| split_sentences(t, SplitMode::Rule);
    let cand = split(candidate);
    let mut chrf = Builtin::Chrf(ChrfParams::default());

    let per_ref: Vec<SmartTriple> = references
        .iter()
        .map(|r| smart_for_pair(&split(r), &cand, &mut chrf, None).unwrap())
        .collect();
    for (r, t) in references.iter().zip(&per_ref) {
        println!("ref  SL f={:.4}  {r}", t.sl.fmeasure);
    }
    let best_ref = aggregate_reference_triples(&per_ref, ReportField::F).unwrap();
    let src = smart_for_pair(&split(source), &cand, &mut chrf, None).unwrap();
    println!("src  SL f={:.4}\n", src.sl.fmeasure);

    for mode in [
        SourceRefMode::Max,
        SourceRefMode::Average,
        SourceRefMode::Minimum,
        SourceRefMode::RefOnly,
        SourceRefMode::SrcOnly,
    ] {
        let policy = AggregationPolicy {
            source_ref_mode: mode,
            report: ReportField::F,
        };
        let t = aggregate_triples(&src, &best_ref, policy);
        println!(
            "{:<10} S1={:.4} S2={:.4} SL={:.4} SX={:.4}",
            format!("{mode:?}"),
            t.s1.fmeasure,
            t.s2.fmeasure,
            t.sl.fmeasure,
            t.smart_x(ReportField::F)
        );
    }
}
