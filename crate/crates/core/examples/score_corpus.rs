//! Library-level equivalent of `smart score`.
//!
//! ```text
//! cargo run --example score_corpus -- examples/data/toy_corpus.jsonl rougeL average
//! ```
//!
//! Prints one JSONL score record per corpus record.

use std::io;
use std::path::PathBuf;

use smart_eval::corpus::{read_corpus, write_jsonl};
use smart_eval::runner::{score_corpus, ScoreOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let corpus = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/toy_corpus.jsonl"));

    let options = ScoreOptions {
        matcher: args.next(),
        agg: args.next(),
        variants: Some("S1,SL".into()),
        workers: Some(2),
        ..Default::default()
    };
    let config = options.resolve()?;
    eprintln!("matcher {}, aggregation {:?}", config.matcher_name(), config.policy.source_ref_mode);

    let records = score_corpus(&read_corpus(&corpus)?, &config)?;
    write_jsonl(io::stdout().lock(), &records)?;
    Ok(())
}
