//! Character n-gram F-score.
//!
//! Whitespace is removed before extracting n-grams. Precision and recall are
//! averaged over the orders where both sides have at least one n-gram, then
//! combined into an F-beta score.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChrfParams {
    pub char_order: usize,
    pub beta: f64,
}

impl Default for ChrfParams {
    fn default() -> Self {
        ChrfParams {
            char_order: 6,
            beta: 2.0,
        }
    }
}

fn ngram_counts(chars: &[char], n: usize) -> HashMap<&[char], u32> {
    let mut counts = HashMap::with_capacity(chars.len());
    for w in chars.windows(n) {
        *counts.entry(w).or_insert(0) += 1;
    }
    counts
}

fn strip_whitespace(s: &str) -> Vec<char> {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// chrF of hypothesis `a` against reference `b` with the default parameters
/// (order 6, beta 2). Value in `[0, 1]`.
pub fn chrf(a: &str, b: &str) -> f64 {
    chrf_with(a, b, ChrfParams::default())
}

pub fn chrf_with(a: &str, b: &str, params: ChrfParams) -> f64 {
    let hyp = strip_whitespace(a);
    let reference = strip_whitespace(b);

    let mut avg_precision = 0.0;
    let mut avg_recall = 0.0;
    let mut effective_order = 0usize;
    for n in 1..=params.char_order {
        if hyp.len() < n || reference.len() < n {
            break;
        }
        let hyp_counts = ngram_counts(&hyp, n);
        let ref_counts = ngram_counts(&reference, n);
        let matches: u32 = hyp_counts
            .iter()
            .filter_map(|(g, &h)| ref_counts.get(g).map(|&r| h.min(r)))
            .sum();
        let hyp_total = (hyp.len() + 1 - n) as f64;
        let ref_total = (reference.len() + 1 - n) as f64;
        avg_precision += matches as f64 / hyp_total;
        avg_recall += matches as f64 / ref_total;
        effective_order += 1;
    }
    if effective_order == 0 {
        return 0.0;
    }
    avg_precision /= effective_order as f64;
    avg_recall /= effective_order as f64;
    if avg_precision + avg_recall == 0.0 {
        return 0.0;
    }
    let factor = params.beta * params.beta;
    let score = (1.0 + factor) * avg_precision * avg_recall / (factor * avg_precision + avg_recall);
    score.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force multiset oracle: enumerate every n-gram as a String and
    /// count matches by removing them one by one from the reference bag.
    fn oracle(a: &str, b: &str, order: usize, beta: f64) -> f64 {
        let a: Vec<char> = a.chars().filter(|c| !c.is_whitespace()).collect();
        let b: Vec<char> = b.chars().filter(|c| !c.is_whitespace()).collect();
        let grams = |s: &[char], n: usize| -> Vec<String> {
            (0..s.len().saturating_sub(n - 1))
                .filter(|&i| i + n <= s.len())
                .map(|i| s[i..i + n].iter().collect())
                .collect()
        };
        let (mut p, mut r, mut k) = (0.0, 0.0, 0.0);
        for n in 1..=order {
            let ga = grams(&a, n);
            let mut gb = grams(&b, n);
            if ga.is_empty() || gb.is_empty() {
                continue;
            }
            let total_b = gb.len() as f64;
            let mut m = 0.0;
            for g in &ga {
                if let Some(pos) = gb.iter().position(|x| x == g) {
                    gb.swap_remove(pos);
                    m += 1.0;
                }
            }
            p += m / ga.len() as f64;
            r += m / total_b;
            k += 1.0;
        }
        if k == 0.0 {
            return 0.0;
        }
        let (p, r) = (p / k, r / k);
        if p + r == 0.0 {
            0.0
        } else {
            (1.0 + beta * beta) * p * r / (beta * beta * p + r)
        }
    }

    #[test]
    fn identical_and_disjoint() {
        assert_eq!(chrf("hello world", "hello world"), 1.0);
        assert_eq!(chrf("ab", "ab"), 1.0);
        assert_eq!(chrf("abc", "xyz"), 0.0);
        assert_eq!(chrf("", "abc"), 0.0);
    }

    #[test]
    fn brute_force_oracle_value() {
        // orders 1..4: P = R = 3/4, 2/3, 1/2, 0 -> mean 23/48
        let expected = oracle("abcd", "abce", 6, 2.0);
        assert!((expected - 23.0 / 48.0).abs() < 1e-15);
        assert!((chrf("abcd", "abce") - expected).abs() < 1e-15);
    }

    // Frozen from sacrebleu 2.6.0 CHRF() sentence scores / 100.
    #[test]
    fn matches_reference_implementation() {
        let cases = [
            ("abcd", "abce", 0.47916666666666674),
            ("The cat sat on the mat.", "A cat was sitting on a mat", 0.16578352176872657),
            ("A cat was sitting on a mat", "The cat sat on the mat.", 0.1769141169812891),
            ("ab", "abcdefgh", 0.23404255319148937),
            ("Grüße aus Köln", "Grüsse aus Koeln", 0.32143755850153033),
            ("a b c", "abc", 1.0),
            ("x", "y", 0.0),
        ];
        for (a, b, expected) in cases {
            let got = chrf(a, b);
            assert!((got - expected).abs() < 1e-12, "{a:?}/{b:?}: {got} vs {expected}");
            assert!((got - oracle(a, b, 6, 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_with_recall_weighting() {
        let a = "The cat sat on the mat.";
        let b = "A cat was sitting on a mat";
        assert_ne!(chrf(a, b), chrf(b, a));
        let beta1 = ChrfParams { beta: 1.0, ..Default::default() };
        assert!((chrf_with(a, b, beta1) - chrf_with(b, a, beta1)).abs() < 1e-15);
        assert!((chrf_with(a, b, beta1) - 0.1711680621479697).abs() < 1e-12);
    }
}
