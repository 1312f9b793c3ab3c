//! The four random pool designs and their parameters.
//!
//! | model | what is random | parameter |
//! |-------|----------------|-----------|
//! | RID   | every entry, 0 with probability `p` | `p ∈ (0,1)` |
//! | RrSD  | every row, uniform of weight `r` | `r ∈ [0,n]` |
//! | RsSD  | every column, uniform of weight `s` | `s ∈ [0,m]` |
//! | UTDq  | every entry of a q-ary pre-image, uniform on `1..=q` | `q ≥ 2` |
//!
//! Generators are pure functions of their dimensions, parameter and random
//! stream.

mod sizing;

pub use sizing::{
    lower_bound_m, upper_bound_m, upper_bound_m_with, SizingMethod, SizingOptions, SizingResult,
};

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::bitmat::{BitMatrix, QaryMatrix};
use crate::error::{Error, Result};
use crate::rng;
use crate::theory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Rid,
    Rrsd,
    Rssd,
    Utdq,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::Rid, Model::Rrsd, Model::Rssd, Model::Utdq];

    pub fn name(self) -> &'static str {
        match self {
            Model::Rid => "rid",
            Model::Rrsd => "rrsd",
            Model::Rssd => "rssd",
            Model::Utdq => "utdq",
        }
    }

    /// Name of the model's parameter (`p`, `r`, `s` or `q`).
    pub fn param_name(self) -> &'static str {
        match self {
            Model::Rid => "p",
            Model::Rrsd => "r",
            Model::Rssd => "s",
            Model::Utdq => "q",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rid" => Ok(Model::Rid),
            "rrsd" => Ok(Model::Rrsd),
            "rssd" => Ok(Model::Rssd),
            "utdq" => Ok(Model::Utdq),
            _ => Err(Error::Parameter(format!("unknown model {s:?}"))),
        }
    }
}

/// The model parameter; the variant determines the model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DesignParam {
    /// RID: probability that an entry is 0.
    P(f64),
    /// RrSD: row weight.
    R(usize),
    /// RsSD: column weight.
    S(usize),
    /// UTDq: alphabet size.
    Q(u32),
}

impl DesignParam {
    pub fn model(&self) -> Model {
        match self {
            DesignParam::P(_) => Model::Rid,
            DesignParam::R(_) => Model::Rrsd,
            DesignParam::S(_) => Model::Rssd,
            DesignParam::Q(_) => Model::Utdq,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            DesignParam::P(p) => p,
            DesignParam::R(r) => r as f64,
            DesignParam::S(s) => s as f64,
            DesignParam::Q(q) => q as f64,
        }
    }
}

impl fmt::Display for DesignParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignParam::P(p) => write!(f, "p={p}"),
            DesignParam::R(r) => write!(f, "r={r}"),
            DesignParam::S(s) => write!(f, "s={s}"),
            DesignParam::Q(q) => write!(f, "q={q}"),
        }
    }
}

/// A fully parameterized design: `n` items, `m` binary tests.
/// For UTDq, `m = q·m'` where `m'` is the q-ary row count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DesignSpec {
    pub n: usize,
    pub m: usize,
    pub param: DesignParam,
}

impl DesignSpec {
    pub fn new(n: usize, m: usize, param: DesignParam) -> Result<Self> {
        let spec = DesignSpec { n, m, param };
        spec.validate()?;
        Ok(spec)
    }

    pub fn model(&self) -> Model {
        self.param.model()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Dimension("a design needs at least one item".into()));
        }
        match self.param {
            DesignParam::P(p) => check_p(p),
            DesignParam::R(r) => check_weight("r", r, self.n),
            DesignParam::S(s) => check_weight("s", s, self.m),
            DesignParam::Q(q) => {
                check_q(q)?;
                if !self.m.is_multiple_of(q as usize) {
                    return Err(Error::Parameter(format!(
                        "UTDq needs m = {} to be a multiple of q = {q}",
                        self.m
                    )));
                }
                Ok(())
            }
        }
    }

    /// Draws the binary test matrix. UTDq draws the q-ary pre-image and expands it.
    pub fn generate<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<BitMatrix> {
        self.validate()?;
        Ok(match self.param {
            DesignParam::P(p) => sample_rid(rng, self.n, self.m, p),
            DesignParam::R(r) => sample_rrsd(rng, self.n, self.m, r),
            DesignParam::S(s) => sample_rssd(rng, self.n, self.m, s),
            DesignParam::Q(q) => sample_utdq(rng, self.n, self.m / q as usize, q).expand(),
        })
    }

    pub fn generate_seeded(&self, seed: u64) -> Result<BitMatrix> {
        self.generate(&mut rng::seeded(seed))
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("p = {p} must lie in (0, 1)")))
    }
}

fn check_weight(name: &str, w: usize, max: usize) -> Result<()> {
    if w <= max {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {w} outside 0..={max}")))
    }
}

fn check_q(q: u32) -> Result<()> {
    if q >= 2 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("q = {q} must be at least 2")))
    }
}

/// Fills `out` with bits that are independently 1 with probability `prob`.
///
/// Compares, in parallel across the 64 lanes of a word, a uniform 64-bit
/// fraction `U` against `T = ⌊prob·2^64⌋`, most significant bit first; a
/// lane is decided at the first bit where `U` and `T` differ. The result is
/// exactly `P[bit] = T / 2^64`, and about `log2(64) + 2` words of randomness
/// are consumed per 64 output bits.
fn fill_bernoulli<R: RngCore + ?Sized>(rng: &mut R, prob: f64, out: &mut [u64]) {
    let threshold = (prob * 2f64.powi(64)) as u64;
    for word in out.iter_mut() {
        let mut result = 0u64;
        let mut undecided = u64::MAX;
        for bit in (0..64).rev() {
            let r = rng.next_u64();
            if (threshold >> bit) & 1 == 1 {
                result |= undecided & !r;
                undecided &= r;
            } else {
                undecided &= !r;
            }
            if undecided == 0 {
                break;
            }
        }
        *word = result;
    }
}

/// RID draw: each entry is 0 with probability `p`. Rows are drawn in order,
/// so the first `k` rows do not depend on `m`.
pub fn sample_rid<R: RngCore + ?Sized>(rng: &mut R, n: usize, m: usize, p: f64) -> BitMatrix {
    let mut mat = BitMatrix::zeros(m, n).expect("n > 0");
    for t in 0..m {
        fill_bernoulli(rng, 1.0 - p, mat.row_mut(t));
        mat.mask_row_tail(t);
    }
    mat
}

/// RrSD draw: each row uniform among weight-`r` vectors.
pub fn sample_rrsd<R: RngCore + ?Sized>(rng: &mut R, n: usize, m: usize, r: usize) -> BitMatrix {
    let mut mat = BitMatrix::zeros(m, n).expect("n > 0");
    for t in 0..m {
        for i in index::sample(rng, n, r) {
            mat.set(t, i, true);
        }
    }
    mat
}

/// RsSD draw: each column uniform among weight-`s` vectors.
pub fn sample_rssd<R: RngCore + ?Sized>(rng: &mut R, n: usize, m: usize, s: usize) -> BitMatrix {
    let mut mat = BitMatrix::zeros(m, n).expect("n > 0");
    for i in 0..n {
        for t in index::sample(rng, m, s) {
            mat.set(t, i, true);
        }
    }
    mat
}

/// UTDq draw of the `m' x n` q-ary pre-image, entries uniform on `1..=q`.
pub fn sample_utdq<R: RngCore + ?Sized>(
    rng: &mut R,
    n: usize,
    m_prime: usize,
    q: u32,
) -> QaryMatrix {
    let entries = (0..m_prime * n).map(|_| rng.random_range(1..=q)).collect();
    QaryMatrix::new(m_prime, n, q, entries).expect("entries drawn from 1..=q")
}

pub fn gen_rid(n: usize, m: usize, p: f64, seed: u64) -> Result<BitMatrix> {
    DesignSpec::new(n, m, DesignParam::P(p))?.generate_seeded(seed)
}

pub fn gen_rrsd(n: usize, m: usize, r: usize, seed: u64) -> Result<BitMatrix> {
    DesignSpec::new(n, m, DesignParam::R(r))?.generate_seeded(seed)
}

pub fn gen_rssd(n: usize, m: usize, s: usize, seed: u64) -> Result<BitMatrix> {
    DesignSpec::new(n, m, DesignParam::S(s))?.generate_seeded(seed)
}

pub fn gen_utdq(n: usize, m_prime: usize, q: u32, seed: u64) -> Result<QaryMatrix> {
    check_q(q)?;
    if n == 0 {
        return Err(Error::Dimension("a design needs at least one item".into()));
    }
    Ok(sample_utdq(&mut rng::seeded(seed), n, m_prime, q))
}

/// `p = e^{-1/d}`, the RID zero-probability that makes a row avoid all `d`
/// defectives with probability exactly `1/e`.
pub fn rid_optimal_p(d: usize) -> f64 {
    (-1.0 / d as f64).exp()
}

/// The model's optimal parameter at defect bound `d`.
///
/// RsSD depends on the test count, which must be supplied as `m_hint`.
pub fn optimal_param(
    model: Model,
    n: usize,
    d: usize,
    m_hint: Option<usize>,
) -> Result<DesignParam> {
    if d == 0 {
        return Err(Error::Parameter("d must be at least 1".into()));
    }
    match model {
        Model::Rid => Ok(DesignParam::P(rid_optimal_p(d))),
        Model::Rrsd => {
            if n < d {
                return Err(Error::Parameter(format!(
                    "RrSD needs n >= d, got n = {n}, d = {d}"
                )));
            }
            let r = ((1.0 - rid_optimal_p(d)) * (n - d + 1) as f64).round();
            if r < 0.0 || r > n as f64 {
                return Err(Error::Parameter(format!("rounded r = {r} outside 0..={n}")));
            }
            Ok(DesignParam::R(r as usize))
        }
        Model::Rssd => {
            let m = m_hint.ok_or_else(|| {
                Error::Parameter("RsSD's optimal s depends on m; supply m".into())
            })?;
            let (alpha, _) = theory::rssd_optimal_alpha(to_u32(d)?);
            let s = (alpha * m as f64).round();
            if s < 0.0 || s > m as f64 {
                return Err(Error::Parameter(format!("rounded s = {s} outside 0..={m}")));
            }
            Ok(DesignParam::S(s as usize))
        }
        Model::Utdq => Ok(DesignParam::Q(theory::utdq_optimal_q(to_u32(d)?)?.0)),
    }
}

pub(crate) fn to_u32(d: usize) -> Result<u32> {
    u32::try_from(d).map_err(|_| Error::Capacity(format!("d = {d} too large")))
}
