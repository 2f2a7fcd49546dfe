use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use smart_eval::bridge::stub::{serve, StubScorer};
use smart_eval::corpus::{
    available_columns, check_coverage, metric_table, read_corpus, read_scores, write_atomic, write_jsonl,
    MetricColumn, ScoreRecord,
};
use smart_eval::metaeval::{
    bias_analysis, correlation_report, length_bucket_analysis, BucketTable, QualityDimension,
};
use smart_eval::runner::{score_corpus, ScoreOptions};
use smart_eval::smart::ReportField;

#[derive(Parser)]
#[command(name = "smart", version, about = "Score summaries with SMART and meta-evaluate the scores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a JSONL corpus, writing one score record per input record.
    Score(ScoreArgs),
    /// System-level Kendall tau of score files against human ratings.
    MetaEval(MetaEvalArgs),
    /// Correlations within reference-length buckets, against a baseline.
    Buckets(BucketArgs),
    /// Human rank minus metric rank per system.
    Bias(BiasArgs),
    /// Serve the bridge protocol on stdio with a deterministic scorer.
    #[command(hide = true)]
    BridgeStub {
        #[arg(long, default_value = "chrf")]
        scorer: String,
    },
}

#[derive(Args)]
struct ScoreArgs {
    /// Input corpus (JSONL).
    #[arg(long)]
    corpus: PathBuf,
    /// Output score file; `-` writes to stdout.
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// rouge1 | rouge2 | rougeL | bleu | chrf | external
    #[arg(long)]
    matcher: Option<String>,
    /// Command line of the external matcher process.
    #[arg(long)]
    bridge_cmd: Option<String>,
    /// Metric-name label of the external matcher, e.g. BLEURT.
    #[arg(long)]
    bridge_label: Option<String>,
    /// Seconds to wait for each bridge batch.
    #[arg(long)]
    bridge_timeout: Option<f64>,
    /// Sentence pairs per bridge request.
    #[arg(long)]
    batch_size: Option<usize>,
    /// max | average | minimum | ref-only | src-only
    #[arg(long)]
    agg: Option<String>,
    /// f | p | r
    #[arg(long)]
    report: Option<String>,
    /// rule | newline
    #[arg(long)]
    split: Option<String>,
    /// Comma-separated subset of S1,S2,SL.
    #[arg(long)]
    variants: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct Inputs {
    /// Corpus with human ratings (JSONL).
    #[arg(long)]
    corpus: PathBuf,
    /// f | p | r
    #[arg(long, default_value = "f")]
    report: ReportField,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct MetaEvalArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Score file; repeat to compare several.
    #[arg(long, required = true)]
    scores: Vec<PathBuf>,
    /// Comma-separated quality dimensions.
    #[arg(long, value_delimiter = ',', default_value = "coherence,factuality,fluency,informativeness")]
    dims: Vec<QualityDimension>,
}

#[derive(Args)]
struct BucketArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    scores: PathBuf,
    /// S1 | S2 | SL | SX
    #[arg(long, default_value = "SL")]
    metric: MetricColumn,
    #[arg(long)]
    baseline_scores: PathBuf,
    /// Defaults to --metric.
    #[arg(long)]
    baseline_metric: Option<MetricColumn>,
    #[arg(long, default_value = "coherence")]
    dim: QualityDimension,
    /// Number of buckets (default 4).
    #[arg(long)]
    buckets: Option<usize>,
    /// TOML file; only `buckets` is read.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BiasArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    scores: PathBuf,
    /// S1 | S2 | SL | SX
    #[arg(long, default_value = "SL")]
    metric: MetricColumn,
    #[arg(long, default_value = "coherence")]
    dim: QualityDimension,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Score(args) => score(args),
        Command::MetaEval(args) => meta_eval(args),
        Command::Buckets(args) => buckets(args),
        Command::Bias(args) => bias(args),
        Command::BridgeStub { scorer } => {
            let scorer: StubScorer = scorer.parse().map_err(anyhow::Error::msg)?;
            serve(io::stdin().lock(), io::stdout().lock(), scorer.into_fn())?;
            Ok(())
        }
    }
}

fn score(args: ScoreArgs) -> Result<()> {
    let flags = ScoreOptions {
        matcher: args.matcher,
        bridge_cmd: args.bridge_cmd,
        bridge_label: args.bridge_label,
        bridge_timeout: args.bridge_timeout,
        batch_size: args.batch_size,
        agg: args.agg,
        report: args.report,
        split: args.split,
        variants: args.variants,
        workers: args.workers,
        buckets: None,
    };
    let options = match &args.config {
        Some(path) => flags.or(ScoreOptions::from_file(path)?),
        None => flags,
    };
    let config = options.resolve()?;
    let corpus = read_corpus(&args.corpus)?;
    let records = score_corpus(&corpus, &config)?;

    let mut buf = Vec::new();
    write_jsonl(&mut buf, &records)?;
    emit(&args.output, &buf)
}

fn emit(path: &Path, bytes: &[u8]) -> Result<()> {
    if path == Path::new("-") {
        io::stdout().lock().write_all(bytes)?;
        return Ok(());
    }
    write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_report<T: Serialize>(path: Option<&Path>, report: &T) -> Result<()> {
    if let Some(path) = path {
        let mut json = serde_json::to_vec_pretty(report)?;
        json.push(b'\n');
        emit(path, &json)?;
    }
    Ok(())
}

fn load_scores(path: &Path) -> Result<Vec<ScoreRecord>> {
    let records = read_scores(path)?;
    if records.is_empty() {
        bail!("{} contains no score records", path.display());
    }
    Ok(records)
}

fn meta_eval(args: MetaEvalArgs) -> Result<()> {
    let corpus = read_corpus(&args.inputs.corpus)?;
    let mut metrics = Vec::new();
    for path in &args.scores {
        let records = load_scores(path)?;
        for column in available_columns(&records) {
            let (name, table) = metric_table(&records, column, args.inputs.report)?;
            check_coverage(&corpus, &table).with_context(|| path.display().to_string())?;
            metrics.push((name, table));
        }
    }
    let report = correlation_report(&corpus, &metrics, &args.dims)?;
    print!("{report}");
    write_report(args.inputs.json.as_deref(), &report)
}

fn load_metric(
    path: &Path,
    column: MetricColumn,
    field: ReportField,
    corpus: &[smart_eval::corpus::EvalInstance],
) -> Result<smart_eval::metaeval::ScoreTable> {
    let (_, table) = metric_table(&load_scores(path)?, column, field)?;
    check_coverage(corpus, &table).with_context(|| path.display().to_string())?;
    Ok(table)
}

fn buckets(args: BucketArgs) -> Result<()> {
    let from_file = match &args.config {
        Some(path) => ScoreOptions::from_file(path)?.buckets,
        None => None,
    };
    let count = args.buckets.or(from_file).unwrap_or(4);
    let corpus = read_corpus(&args.inputs.corpus)?;
    let field = args.inputs.report;
    let metric = load_metric(&args.scores, args.metric, field, &corpus)?;
    let baseline = load_metric(
        &args.baseline_scores,
        args.baseline_metric.unwrap_or(args.metric),
        field,
        &corpus,
    )?;
    let reports = length_bucket_analysis(&corpus, &metric, &baseline, args.dim, count)?;
    print!("{}", BucketTable(&reports));
    write_report(args.inputs.json.as_deref(), &reports)
}

fn bias(args: BiasArgs) -> Result<()> {
    let corpus = read_corpus(&args.inputs.corpus)?;
    let metric = load_metric(&args.scores, args.metric, args.inputs.report, &corpus)?;
    let report = bias_analysis(&corpus, &metric, args.dim)?;
    print!("{report}");
    write_report(args.inputs.json.as_deref(), &report)
}
