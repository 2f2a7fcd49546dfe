//! Token-level ROUGE-N and ROUGE-L F1, as used for sentence matching.

use std::collections::HashMap;

fn f1(overlap: f64, a_total: f64, b_total: f64) -> f64 {
    if a_total == 0.0 || b_total == 0.0 {
        return 0.0;
    }
    let precision = overlap / a_total;
    let recall = overlap / b_total;
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for window in tokens.windows(n) {
        let key: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram overlap F1 between `a` (candidate side) and `b`.
/// Zero when either side has no n-grams of order `n`.
pub fn rouge_n_f1<S: AsRef<str>>(a: &[S], b: &[S], n: usize) -> f64 {
    let a_counts = ngram_counts(a, n);
    let b_counts = ngram_counts(b, n);
    let a_total: usize = a_counts.values().sum();
    let b_total: usize = b_counts.values().sum();
    let overlap: usize = a_counts
        .iter()
        .filter_map(|(gram, &ca)| b_counts.get(gram).map(|&cb| ca.min(cb)))
        .sum();
    f1(overlap as f64, a_total as f64, b_total as f64)
}

/// Length of the classic longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// LCS-based F1: precision = lcs/|a|, recall = lcs/|b|.
pub fn rouge_l_f1<S: AsRef<str>>(a: &[S], b: &[S]) -> f64 {
    let a: Vec<&str> = a.iter().map(AsRef::as_ref).collect();
    let b: Vec<&str> = b.iter().map(AsRef::as_ref).collect();
    let lcs = lcs_len(&a, &b);
    f1(lcs as f64, a.len() as f64, b.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rouge_n_examples() {
        assert_eq!(rouge_n_f1(&["a", "b", "c"], &["a", "b", "c"], 2), 1.0);
        assert_eq!(rouge_n_f1(&["a"], &["b"], 1), 0.0);
        // bigrams {ab, bc} vs {ac, cb}
        assert_eq!(rouge_n_f1(&["a", "b", "c"], &["a", "c", "b"], 2), 0.0);
        assert_eq!(rouge_n_f1(&["a"], &["a"], 2), 0.0);
        let a = ["the", "cat", "sat"];
        let b = ["the", "dog", "sat"];
        assert!((rouge_n_f1(&a, &b, 1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rouge_n_clips_repeated_tokens() {
        // overlap min(3,1)=1: P=1/3, R=1
        let v = rouge_n_f1(&["a", "a", "a"], &["a"], 1);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rouge_l_examples() {
        assert_eq!(rouge_l_f1(&["x", "y"], &["x", "y"]), 1.0);
        let v = rouge_l_f1(&["a", "b", "c", "d"], &["b", "d"]);
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(rouge_l_f1::<&str>(&[], &["x"]), 0.0);
    }

    #[test]
    fn lcs_len_basic() {
        assert_eq!(lcs_len(b"ABCBDAB", b"BDCABA"), 4);
        assert_eq!(lcs_len::<u8>(b"", b"abc"), 0);
    }
}
