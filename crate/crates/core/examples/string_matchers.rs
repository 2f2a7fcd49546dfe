//! The built-in sentence matchers side by side.
//!
//! ```text
//! cargo run --example string_matchers -- "the cat sat on the mat" "a cat was sitting on a mat"
//! ```

use smart_eval::matchers::{Builtin, ChrfParams};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let pairs: Vec<(String, String)> = match args.as_slice() {
        [a, b] => vec![(a.clone(), b.clone())],
        _ => [
            ("The cat sat on the mat.", "A cat was sitting on a mat."),
            ("Shares fell three percent.", "The company's shares dropped."),
            ("It rained.", "Heavy rain flooded the river valley overnight."),
        ]
        .iter()
        .map(|(a, b)| ((*a).to_owned(), (*b).to_owned()))
        .collect(),
    };

    let matchers = [
        Builtin::Rouge1,
        Builtin::Rouge2,
        Builtin::RougeL,
        Builtin::Bleu,
        Builtin::Chrf(ChrfParams::default()),
    ];

    for (hyp, prem) in &pairs {
        println!("hyp:  {hyp}\nprem: {prem}");
        for m in &matchers {
            let forward = m.score(hyp, prem);
            let backward = m.score(prem, hyp);
            println!("  {:<7} {forward:.4}  (swapped {backward:.4})", m.kind().as_str());
        }
        println!();
    }
}
