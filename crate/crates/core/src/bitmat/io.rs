//! Plain-text matrix and answer files.
//!
//! Binary matrix: a header line `m n`, then `m` lines of exactly `n`
//! characters from `{0,1}`. Q-ary matrix: a header line `m' n q`, then `m'`
//! lines of `n` space-separated decimals in `1..=q`. Answer vector: a single
//! line of `m` characters from `{0,1}`. Every line ends with `\n`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{AnswerVector, BitMatrix, QaryMatrix};
use crate::error::{Error, Result};

/// Either kind of matrix file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matrix {
    Binary(BitMatrix),
    Qary(QaryMatrix),
}

impl Matrix {
    /// The binary test matrix: q-ary matrices are expanded.
    pub fn to_binary(&self) -> BitMatrix {
        match self {
            Matrix::Binary(m) => m.clone(),
            Matrix::Qary(mq) => mq.expand(),
        }
    }
}

impl From<BitMatrix> for Matrix {
    fn from(m: BitMatrix) -> Self {
        Matrix::Binary(m)
    }
}

impl From<QaryMatrix> for Matrix {
    fn from(m: QaryMatrix) -> Self {
        Matrix::Qary(m)
    }
}

fn parse_usize(source: &str, line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| {
        Error::parse(
            source,
            line,
            format!("{what} {tok:?} is not a non-negative integer"),
        )
    })
}

/// Parses matrix text. `source` names the input in error messages.
pub fn parse_matrix(text: &str, source: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(source, 1, "empty file, expected a header"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    let matrix = match fields.as_slice() {
        [m, n] => {
            let m = parse_usize(source, 1, m, "row count")?;
            let n = parse_usize(source, 1, n, "column count")?;
            if n == 0 {
                return Err(Error::parse(source, 1, "column count must be positive"));
            }
            let mut mat = BitMatrix::zeros(m, n)?;
            for t in 0..m {
                let (ln, row) = lines.next().ok_or_else(|| {
                    Error::parse(source, t + 2, format!("missing row {} of {m}", t + 1))
                })?;
                if row.len() != n {
                    return Err(Error::parse(
                        source,
                        ln,
                        format!("row has {} characters, expected {n}", row.len()),
                    ));
                }
                for (i, c) in row.bytes().enumerate() {
                    match c {
                        b'0' => {}
                        b'1' => mat.set(t, i, true),
                        _ => {
                            return Err(Error::parse(
                                source,
                                ln,
                                format!("illegal symbol {:?} in column {}", c as char, i + 1),
                            ))
                        }
                    }
                }
            }
            Matrix::Binary(mat)
        }
        [m, n, q] => {
            let m = parse_usize(source, 1, m, "row count")?;
            let n = parse_usize(source, 1, n, "column count")?;
            let q = parse_usize(source, 1, q, "alphabet size")?;
            if n == 0 {
                return Err(Error::parse(source, 1, "column count must be positive"));
            }
            if !(2..=u32::MAX as usize).contains(&q) {
                return Err(Error::parse(
                    source,
                    1,
                    format!("alphabet size {q} must be at least 2"),
                ));
            }
            let mut entries = Vec::with_capacity(m * n);
            for t in 0..m {
                let (ln, row) = lines.next().ok_or_else(|| {
                    Error::parse(source, t + 2, format!("missing row {} of {m}", t + 1))
                })?;
                let toks: Vec<&str> = row.split(' ').collect();
                if toks.len() != n {
                    return Err(Error::parse(
                        source,
                        ln,
                        format!("row has {} entries, expected {n}", toks.len()),
                    ));
                }
                for (i, tok) in toks.iter().enumerate() {
                    let v = tok.parse::<usize>().ok().filter(|v| (1..=q).contains(v));
                    match v {
                        Some(v) => entries.push(v as u32),
                        None => {
                            return Err(Error::parse(
                                source,
                                ln,
                                format!(
                                    "illegal symbol {tok:?} in column {}, expected 1..={q}",
                                    i + 1
                                ),
                            ))
                        }
                    }
                }
            }
            Matrix::Qary(QaryMatrix::new(m, n, q as u32, entries)?)
        }
        _ => {
            return Err(Error::parse(
                source,
                1,
                "header must be \"m n\" (binary) or \"m n q\" (q-ary)",
            ))
        }
    };
    for (ln, rest) in lines {
        if !rest.is_empty() {
            return Err(Error::parse(
                source,
                ln,
                "unexpected content after the last row",
            ));
        }
    }
    Ok(matrix)
}

pub fn render_matrix(matrix: &Matrix) -> String {
    let mut out = String::new();
    match matrix {
        Matrix::Binary(m) => {
            let _ = writeln!(out, "{} {}", m.rows(), m.cols());
            for t in 0..m.rows() {
                out.extend((0..m.cols()).map(|i| if m.get(t, i) { '1' } else { '0' }));
                out.push('\n');
            }
        }
        Matrix::Qary(mq) => {
            let _ = writeln!(out, "{} {} {}", mq.rows(), mq.cols(), mq.q());
            for r in 0..mq.rows() {
                let row: Vec<String> = mq.row(r).iter().map(u32::to_string).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
    }
    out
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    parse_matrix(&read_text(path)?, &path.display().to_string())
}

pub fn write_matrix(path: impl AsRef<Path>, matrix: &Matrix) -> Result<()> {
    write_text(path.as_ref(), &render_matrix(matrix))
}

/// Parses an answer line. When `expected_len` is given, a length mismatch is
/// a parse error against `source`.
pub fn parse_answers(
    text: &str,
    source: &str,
    expected_len: Option<usize>,
) -> Result<AnswerVector> {
    let mut lines = text.lines();
    let line = lines.next().unwrap_or("");
    let mut bits = Vec::with_capacity(line.len());
    for (i, c) in line.bytes().enumerate() {
        match c {
            b'0' => bits.push(false),
            b'1' => bits.push(true),
            _ => {
                return Err(Error::parse(
                    source,
                    1,
                    format!("illegal symbol {:?} at position {}", c as char, i + 1),
                ))
            }
        }
    }
    if let Some(m) = expected_len {
        if bits.len() != m {
            return Err(Error::parse(
                source,
                1,
                format!(
                    "answer vector has length {}, matrix has {m} tests",
                    bits.len()
                ),
            ));
        }
    }
    if lines.any(|l| !l.is_empty()) {
        return Err(Error::parse(
            source,
            2,
            "answer file must contain a single line",
        ));
    }
    Ok(AnswerVector::new(bits))
}

pub fn render_answers(answers: &AnswerVector) -> String {
    let mut s: String = answers
        .bits()
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    s.push('\n');
    s
}

pub fn read_answers(path: impl AsRef<Path>, expected_len: Option<usize>) -> Result<AnswerVector> {
    let path = path.as_ref();
    parse_answers(&read_text(path)?, &path.display().to_string(), expected_len)
}

pub fn write_answers(path: impl AsRef<Path>, answers: &AnswerVector) -> Result<()> {
    write_text(path.as_ref(), &render_answers(answers))
}
