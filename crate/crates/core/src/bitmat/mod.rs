//! Binary and q-ary test matrices.
//!
//! A [`BitMatrix`] stores an `m x n` 0/1 matrix row-major in packed `u64`
//! words: row `t` is test `t`, column `i` is item `i`. Bits past column `n`
//! in the last word of a row are always zero, so whole-word operations on
//! rows never see garbage.
//!
//! Library indices are 0-based. Files and the command line use 1-based item
//! labels; [`DefectiveSet::from_labels`] and [`DefectiveSet::labels`]
//! convert at that boundary.

mod io;

pub use io::{
    parse_answers, parse_matrix, read_answers, read_matrix, render_answers, render_matrix,
    write_answers, write_matrix, Matrix,
};

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Mask of the valid bits in the last word of a `bits`-wide packed vector.
#[inline]
pub(crate) fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    m: usize,
    n: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// All-zero `m x n` matrix. `n` must be positive; `m` may be zero (a
    /// design with no tests).
    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension(
                "a matrix needs at least one column".into(),
            ));
        }
        let words_per_row = words_for(n);
        Ok(BitMatrix {
            m,
            n,
            words_per_row,
            data: vec![0; m * words_per_row],
        })
    }

    pub fn ones(m: usize, n: usize) -> Result<Self> {
        let mut mat = Self::zeros(m, n)?;
        for t in 0..m {
            mat.row_mut(t).fill(u64::MAX);
            mat.mask_row_tail(t);
        }
        Ok(mat)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut mat = Self::zeros(n, n)?;
        for i in 0..n {
            mat.set(i, i, true);
        }
        Ok(mat)
    }

    /// Builds a matrix from rows written as `'0'`/`'1'` strings.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut mat = Self::zeros(rows.len(), n)?;
        for (t, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {} has length {}, expected {n}",
                    t + 1,
                    row.len()
                )));
            }
            for (i, c) in row.bytes().enumerate() {
                match c {
                    b'0' => {}
                    b'1' => mat.set(t, i, true),
                    _ => {
                        return Err(Error::Dimension(format!(
                            "row {} contains {:?}",
                            t + 1,
                            c as char
                        )))
                    }
                }
            }
        }
        Ok(mat)
    }

    /// Test count.
    #[inline]
    pub fn rows(&self) -> usize {
        self.m
    }

    /// Item count.
    #[inline]
    pub fn cols(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    #[inline]
    pub fn get(&self, t: usize, i: usize) -> bool {
        assert!(
            t < self.m && i < self.n,
            "({t}, {i}) outside {}x{}",
            self.m,
            self.n
        );
        let w = self.data[t * self.words_per_row + i / WORD_BITS];
        (w >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, t: usize, i: usize, value: bool) {
        assert!(
            t < self.m && i < self.n,
            "({t}, {i}) outside {}x{}",
            self.m,
            self.n
        );
        let w = &mut self.data[t * self.words_per_row + i / WORD_BITS];
        let bit = 1u64 << (i % WORD_BITS);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    /// Packed words of row `t`.
    #[inline]
    pub fn row(&self, t: usize) -> &[u64] {
        let start = t * self.words_per_row;
        &self.data[start..start + self.words_per_row]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, t: usize) -> &mut [u64] {
        let start = t * self.words_per_row;
        &mut self.data[start..start + self.words_per_row]
    }

    #[inline]
    pub(crate) fn mask_row_tail(&mut self, t: usize) {
        let mask = tail_mask(self.n);
        if let Some(last) = self.row_mut(t).last_mut() {
            *last &= mask;
        }
    }

    pub fn row_weight(&self, t: usize) -> usize {
        self.row(t).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn column_weight(&self, i: usize) -> usize {
        (0..self.m).filter(|&t| self.get(t, i)).count()
    }

    /// Column `i` as a 0/1 vector of length `m`.
    pub fn column(&self, i: usize) -> Vec<bool> {
        (0..self.m).map(|t| self.get(t, i)).collect()
    }

    /// Columns packed into `u64` words, one packed vector of `m` bits per item.
    pub(crate) fn packed_columns(&self) -> Vec<Vec<u64>> {
        let words = words_for(self.m);
        let mut cols = vec![vec![0u64; words]; self.n];
        for t in 0..self.m {
            for (wi, &w) in self.row(t).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    cols[wi * WORD_BITS + b][t / WORD_BITS] |= 1u64 << (t % WORD_BITS);
                    bits &= bits - 1;
                }
            }
        }
        cols
    }

    /// Copy with row `t` removed.
    pub fn without_row(&self, t: usize) -> BitMatrix {
        assert!(t < self.m);
        let mut data = Vec::with_capacity((self.m - 1) * self.words_per_row);
        for r in (0..self.m).filter(|&r| r != t) {
            data.extend_from_slice(self.row(r));
        }
        BitMatrix {
            m: self.m - 1,
            n: self.n,
            words_per_row: self.words_per_row,
            data,
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.m, self.n)?;
        for t in 0..self.m {
            let row: String = (0..self.n)
                .map(|i| if self.get(t, i) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// `m' x n` matrix over the alphabet `{1, ..., q}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QaryMatrix {
    m_prime: usize,
    n: usize,
    q: u32,
    entries: Vec<u32>,
}

impl QaryMatrix {
    /// Builds from row-major entries. Every entry must lie in `1..=q`.
    pub fn new(m_prime: usize, n: usize, q: u32, entries: Vec<u32>) -> Result<Self> {
        if q < 2 {
            return Err(Error::Parameter(format!(
                "alphabet size q = {q} must be at least 2"
            )));
        }
        if n == 0 {
            return Err(Error::Dimension(
                "a matrix needs at least one column".into(),
            ));
        }
        if entries.len() != m_prime * n {
            return Err(Error::Dimension(format!(
                "{} entries for a {m_prime}x{n} matrix",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|&e| e < 1 || e > q) {
            return Err(Error::Parameter(format!(
                "entry ({}, {}) = {} outside 1..={q}",
                pos / n + 1,
                pos % n + 1,
                entries[pos]
            )));
        }
        Ok(QaryMatrix {
            m_prime,
            n,
            q,
            entries,
        })
    }

    pub fn from_rows(q: u32, rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged q-ary rows".into()));
        }
        Self::new(rows.len(), n, q, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.m_prime
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    /// Number of distinct symbols in row `row` over the given columns.
    pub fn symbol_count(&self, row: usize, cols: &[usize]) -> usize {
        let mut seen = vec![false; self.q as usize + 1];
        let mut count = 0;
        for &c in cols {
            let s = self.get(row, c) as usize;
            if !seen[s] {
                seen[s] = true;
                count += 1;
            }
        }
        count
    }

    /// Binary expansion: q-ary row `r` becomes binary rows `r*q .. r*q + q`,
    /// where binary row `r*q + (σ-1)` marks the items holding symbol `σ`.
    pub fn expand(&self) -> BitMatrix {
        let q = self.q as usize;
        let mut out = BitMatrix::zeros(self.m_prime * q, self.n)
            .expect("q-ary matrix has positive column count");
        for r in 0..self.m_prime {
            for (j, &sym) in self.row(r).iter().enumerate() {
                out.set(r * q + sym as usize - 1, j, true);
            }
        }
        out
    }
}

/// Free-function form of [`QaryMatrix::expand`].
pub fn expand_qary(mq: &QaryMatrix) -> BitMatrix {
    mq.expand()
}

/// Test outcomes, one bit per row of the matrix that produced them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnswerVector {
    bits: Vec<bool>,
}

impl AnswerVector {
    pub fn new(bits: Vec<bool>) -> Self {
        AnswerVector { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, t: usize) -> bool {
        self.bits[t]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn positives(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Set of defective items, stored as strictly increasing 0-based indices,
/// together with the declared bound `d` on its size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefectiveSet {
    items: Vec<usize>,
    d_bound: usize,
}

impl DefectiveSet {
    /// From 0-based indices in any order. Duplicates are rejected.
    pub fn new(items: impl IntoIterator<Item = usize>, d_bound: usize) -> Result<Self> {
        let mut items: Vec<usize> = items.into_iter().collect();
        items.sort_unstable();
        if items.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter("defective items must be distinct".into()));
        }
        if items.len() > d_bound {
            return Err(Error::Parameter(format!(
                "{} defectives exceed the bound d = {d_bound}",
                items.len()
            )));
        }
        Ok(DefectiveSet { items, d_bound })
    }

    /// From 1-based item labels.
    pub fn from_labels(labels: &[usize], d_bound: usize) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::Parameter("item labels start at 1".into()));
        }
        Self::new(labels.iter().map(|&l| l - 1), d_bound)
    }

    /// Parses a comma-separated list of 1-based labels such as `"1,4,7"`.
    /// The bound is set to the number of items listed.
    pub fn parse_labels(text: &str) -> Result<Self> {
        let labels = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parameter(format!("bad item label {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let d = labels.len();
        Self::from_labels(&labels, d)
    }

    /// The canonical set `{0, ..., d-1}` (items 1..=d).
    pub fn first(d: usize) -> Self {
        DefectiveSet {
            items: (0..d).collect(),
            d_bound: d,
        }
    }

    pub fn empty(d_bound: usize) -> Self {
        DefectiveSet {
            items: Vec::new(),
            d_bound,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.items
    }

    pub fn labels(&self) -> Vec<usize> {
        self.items.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn d_bound(&self) -> usize {
        self.d_bound
    }

    pub fn contains(&self, i: usize) -> bool {
        self.items.binary_search(&i).is_ok()
    }

    pub(crate) fn check_range(&self, n: usize) -> Result<()> {
        match self.items.last() {
            Some(&last) if last >= n => Err(Error::Dimension(format!(
                "item {} outside 1..={n}",
                last + 1
            ))),
            _ => Ok(()),
        }
    }
}

/// `T(I, M)`: the bitwise OR of the columns of `m` indexed by `defectives`.
pub fn or_columns(m: &BitMatrix, defectives: &DefectiveSet) -> Result<AnswerVector> {
    defectives.check_range(m.cols())?;
    let bits = (0..m.rows())
        .map(|t| defectives.indices().iter().any(|&i| m.get(t, i)))
        .collect();
    Ok(AnswerVector::new(bits))
}
