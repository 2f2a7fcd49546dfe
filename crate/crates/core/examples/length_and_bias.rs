//! Length buckets and rank bias on the toy corpus.
//!
//! SMART-L with chrF is compared against SMART-1 with unigram overlap inside
//! two buckets of examples grouped by reference length; the bias table shows
//! which systems the metric over- or under-ranks relative to humans.

use std::path::Path;

use smart_eval::corpus::{metric_table, read_corpus, MetricColumn};
use smart_eval::matchers::{MatcherKind, MatcherSpec};
use smart_eval::metaeval::{bias_analysis, length_bucket_analysis, BucketTable, QualityDimension};
use smart_eval::runner::{score_corpus, RunConfig};
use smart_eval::smart::{ReportField, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/toy_corpus.jsonl");
    let corpus = read_corpus(&path)?;

    let table = |kind, variant| -> Result<_, Box<dyn std::error::Error>> {
        let records = score_corpus(&corpus, &RunConfig::new(MatcherSpec::builtin(kind)?))?;
        Ok(metric_table(&records, MetricColumn::Variant(variant), ReportField::F)?.1)
    };
    let metric = table(MatcherKind::Chrf, Variant::SL)?;
    let baseline = table(MatcherKind::Rouge1, Variant::S1)?;

    let dim = QualityDimension::Coherence;
    let buckets = length_bucket_analysis(&corpus, &metric, &baseline, dim, 2)?;
    println!("{dim}: SL-CHRF vs S1-ROUGE1 by reference length");
    print!("{}", BucketTable(&buckets));

    println!("\n{dim}: SL-CHRF rank bias");
    print!("{}", bias_analysis(&corpus, &metric, dim)?);
    Ok(())
}
