//! Scores the toy corpus with several matchers and correlates the per-system
//! means with the human ratings.

use std::path::Path;

use smart_eval::corpus::{metric_table, read_corpus, MetricColumn};
use smart_eval::matchers::{MatcherKind, MatcherSpec};
use smart_eval::metaeval::{correlation_report, kendall_tau, QualityDimension};
use smart_eval::runner::{score_corpus, RunConfig};
use smart_eval::smart::ReportField;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // tau-b handles ties on either side
    let tau = kendall_tau(&[1.0, 2.0, 2.0, 3.0], &[1.0, 3.0, 2.0, 2.0])?;
    println!("kendall_tau([1,2,2,3], [1,3,2,2]) = {tau:.4}\n");

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/toy_corpus.jsonl");
    let corpus = read_corpus(&path)?;

    let mut metrics = Vec::new();
    for kind in [MatcherKind::Rouge1, MatcherKind::Bleu, MatcherKind::Chrf] {
        let mut config = RunConfig::new(MatcherSpec::builtin(kind)?);
        config.workers = 4;
        let records = score_corpus(&corpus, &config)?;
        for column in [MetricColumn::Variant("S1".parse()?), MetricColumn::Variant("SL".parse()?)] {
            metrics.push(metric_table(&records, column, ReportField::F)?);
        }
    }

    let report = correlation_report(&corpus, &metrics, &QualityDimension::ALL)?;
    print!("{report}");
    Ok(())
}
