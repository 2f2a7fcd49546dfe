//! Smoothed sentence-level BLEU.
//!
//! Exponential smoothing: the k-th order with zero matches gets precision
//! `1 / (2^k * total_n)`. The maximum order is `min(4, |candidate|)`, and a
//! candidate without any matching n-gram scores 0.

use std::collections::HashMap;

const MAX_ORDER: usize = 4;

fn counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut out = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *out.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    out
}

/// BLEU of candidate `a` against reference `b`.
pub fn sentence_bleu<S: AsRef<str>>(a: &[S], b: &[S]) -> f64 {
    let cand_len = a.len();
    let ref_len = b.len();
    if cand_len == 0 {
        return 0.0;
    }
    let order = MAX_ORDER.min(cand_len);

    let mut correct = [0usize; MAX_ORDER];
    let mut total = [0usize; MAX_ORDER];
    for n in 1..=order {
        let ref_counts = counts(b, n);
        let cand_counts = counts(a, n);
        total[n - 1] = cand_len + 1 - n;
        correct[n - 1] = cand_counts
            .iter()
            .filter_map(|(g, &c)| ref_counts.get(g).map(|&r| c.min(r)))
            .sum();
    }
    if correct[..order].iter().all(|&c| c == 0) {
        return 0.0;
    }

    let mut smooth = 1.0f64;
    let mut log_sum = 0.0f64;
    for n in 0..order {
        let p = if correct[n] == 0 {
            smooth *= 2.0;
            1.0 / (smooth * total[n] as f64)
        } else {
            correct[n] as f64 / total[n] as f64
        };
        log_sum += p.ln();
    }
    let brevity = if cand_len < ref_len {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    } else {
        1.0
    };
    (brevity * (log_sum / order as f64).exp()).clamp(0.0, 1.0)
}
