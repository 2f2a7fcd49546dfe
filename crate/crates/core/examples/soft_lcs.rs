//! Soft-LCS on a hand-written match matrix.
//!
//! Rows are candidate sentences, columns are reference sentences. The
//! alignment may reuse a reference sentence for consecutive candidate
//! sentences, so the transposed matrix can give a different value.

use smart_eval::smart::{smart_l, smart_n, soft_lcs, MatchMatrix};

fn show(name: &str, m: &MatchMatrix) {
    println!("{name} ({} x {}):", m.rows(), m.cols());
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|v| format!("{v:.1}")).collect();
        println!("  [{}]", row.join(", "));
    }
}

fn main() {
    let m_prec = MatchMatrix::from_rows(&[[0.9, 0.1], [0.2, 0.8], [0.3, 0.4]]).unwrap();
    let m_rec = m_prec.transpose();
    show("candidate x reference", &m_prec);

    println!("soft_lcs(candidate x reference) = {:.4}", soft_lcs(&m_prec));
    println!("soft_lcs(reference x candidate) = {:.4}", soft_lcs(&m_rec));

    // precision divides by the candidate length, recall by the reference length
    let l = smart_l(&m_prec, &m_rec);
    println!("SMART-L  p={:.4} r={:.4} f={:.4}", l.precision, l.recall, l.fmeasure);

    let s1 = smart_n(&m_prec, &m_rec, 1);
    println!("SMART-1  p={:.4} r={:.4} f={:.4}", s1.precision, s1.recall, s1.fmeasure);

    let s2 = smart_n(&m_prec.padded(1), &m_rec.padded(1), 2);
    println!("SMART-2  p={:.4} r={:.4} f={:.4}", s2.precision, s2.recall, s2.fmeasure);
}
