//! Elimination decoding and the disjunct/separable predicates.
//!
//! A row is *good* for `I` when it contains no item of `I`; its answer is
//! negative and every item in it is ruled out. `M` is `(n, I)`-disjunct when
//! the good rows cover every item outside `I`, which is exactly when the
//! elimination decoder recovers `I`.

use crate::bitmat::{tail_mask, words_for, AnswerVector, BitMatrix, DefectiveSet};
use crate::error::{Error, Result};

/// Largest number of candidate sets [`is_separable`] will enumerate.
pub const SEPARABLE_GUARD: u128 = 10_000_000;

fn row_hits(m: &BitMatrix, t: usize, items: &[usize]) -> bool {
    let row = m.row(t);
    items.iter().any(|&i| row[i / 64] >> (i % 64) & 1 == 1)
}

/// Items not contained in any negative test, in increasing order.
pub fn decode_eliminate(m: &BitMatrix, answers: &AnswerVector) -> Result<Vec<usize>> {
    if answers.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "answer vector has length {}, matrix has {} rows",
            answers.len(),
            m.rows()
        )));
    }
    let mut alive = vec![u64::MAX; m.words_per_row()];
    if let Some(last) = alive.last_mut() {
        *last = tail_mask(m.cols());
    }
    for t in (0..m.rows()).filter(|&t| !answers.get(t)) {
        for (a, &w) in alive.iter_mut().zip(m.row(t)) {
            *a &= !w;
        }
    }
    Ok(ones(&alive))
}

fn ones(words: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (wi, &w) in words.iter().enumerate() {
        let mut bits = w;
        while bits != 0 {
            out.push(wi * 64 + bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
    }
    out
}

/// Number of rows with no item of `defectives`.
pub fn good_row_count(m: &BitMatrix, defectives: &DefectiveSet) -> Result<usize> {
    defectives.check_range(m.cols())?;
    Ok((0..m.rows())
        .filter(|&t| !row_hits(m, t, defectives.indices()))
        .count())
}

/// Whether every item outside `defectives` lies in some good row.
pub fn is_disjunct(m: &BitMatrix, defectives: &DefectiveSet) -> Result<bool> {
    defectives.check_range(m.cols())?;
    let mut covered = vec![0u64; m.words_per_row()];
    for &i in defectives.indices() {
        covered[i / 64] |= 1 << (i % 64);
    }
    for t in (0..m.rows()).filter(|&t| !row_hits(m, t, defectives.indices())) {
        for (c, &w) in covered.iter_mut().zip(m.row(t)) {
            *c |= w;
        }
    }
    let full = tail_mask(m.cols());
    let last = covered.len() - 1;
    Ok(covered
        .iter()
        .enumerate()
        .all(|(k, &c)| c == if k == last { full } else { u64::MAX }))
}

/// Number of subsets of `[n]` with at most `d` elements, saturating.
fn candidate_count(n: usize, d: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for k in 0..=d.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - k) as u128) / (k as u128 + 1);
    }
    total
}

/// Whether no other set of at most `d` items yields the same answers as
/// `defectives`. Exhaustive; refuses instances with more than
/// [`SEPARABLE_GUARD`] candidate sets.
pub fn is_separable(m: &BitMatrix, defectives: &DefectiveSet, d: usize) -> Result<bool> {
    defectives.check_range(m.cols())?;
    if defectives.len() > d {
        return Err(Error::Parameter(format!(
            "{} defectives exceed d = {d}",
            defectives.len()
        )));
    }
    let n = m.cols();
    let count = candidate_count(n, d);
    if count > SEPARABLE_GUARD {
        return Err(Error::SizeGuard(format!(
            "separability needs {count} candidate sets for n = {n}, d = {d} (limit {SEPARABLE_GUARD})"
        )));
    }
    let cols = m.packed_columns();
    let words = words_for(m.rows());
    let union = |set: &[usize]| {
        let mut acc = vec![0u64; words];
        for &i in set {
            for (a, &w) in acc.iter_mut().zip(&cols[i]) {
                *a |= w;
            }
        }
        acc
    };
    let target = union(defectives.indices());

    // J by size, then lexicographically
    for k in 0..=d.min(n) {
        let mut j: Vec<usize> = (0..k).collect();
        loop {
            if j != defectives.indices() && union(&j) == target {
                return Ok(false);
            }
            // next k-combination of 0..n
            let Some(pos) = (0..k).rev().find(|&p| j[p] < n - k + p) else {
                break;
            };
            j[pos] += 1;
            for p in pos + 1..k {
                j[p] = j[p - 1] + 1;
            }
        }
    }
    Ok(true)
}
