//! Plugging an out-of-process matcher into SMART.
//!
//! Without arguments the matcher is an in-process stub speaking the bridge
//! protocol over a pipe. With arguments they are run as the matcher command,
//! for example:
//!
//! ```text
//! cargo build && cargo run --example external_bridge -- target/debug/smart bridge-stub --scorer dice
//! ```
//!
//! Any program that reads `{"id":N,"pairs":[{"hyp":..,"prem":..}]}` lines on
//! stdin and answers `{"id":N,"scores":[..]}` lines on stdout works.

use smart_eval::bridge::stub::StubScorer;
use smart_eval::bridge::{BridgeClient, BridgeConfig};
use smart_eval::matchers::{Builtin, ChrfParams};
use smart_eval::smart::smart_for_pair;
use smart_eval::textprep::{split_sentences, SplitMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let reference = split_sentences("Floods forced hundreds of evacuations. Nobody died.", SplitMode::Rule);
    let candidate = split_sentences(
        "Hundreds of homes were evacuated after floods. No deaths were reported.",
        SplitMode::Rule,
    );

    let mut client = if argv.is_empty() {
        let mut config = BridgeConfig::new(vec!["in-process".into()]);
        config.label = "STUB".into();
        BridgeClient::in_process(StubScorer::Chrf.into_fn(), &config)?
    } else {
        let mut config = BridgeConfig::new(argv);
        config.batch_size = 4;
        BridgeClient::spawn(&config)?
    };

    let external = smart_for_pair(&reference, &candidate, &mut client, None)?;
    let builtin = smart_for_pair(&reference, &candidate, &mut Builtin::Chrf(ChrfParams::default()), None)?;

    println!("external  S1={:.6} S2={:.6} SL={:.6}", external.s1.fmeasure, external.s2.fmeasure, external.sl.fmeasure);
    println!("builtin   S1={:.6} S2={:.6} SL={:.6}", builtin.s1.fmeasure, builtin.s2.fmeasure, builtin.sl.fmeasure);
    if external == builtin {
        println!("identical: the bridge is transparent");
    }
    Ok(())
}
