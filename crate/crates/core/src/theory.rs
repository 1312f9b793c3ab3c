//! Constants governing the test counts of the four designs.
//!
//! The combinatorial counts (surjections, `R_{q,d,i}`) are exact big
//! integers; floating point only enters when taking their logarithms.

use std::f64::consts::{E, LN_2, PI};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::designs::Model;
use crate::error::{Error, Result};

/// Largest defect bound `d` accepted by the exact combinatorial routines.
pub const MAX_D: u32 = 256;
/// Largest alphabet size `q` accepted by the exact combinatorial routines.
pub const MAX_Q: u32 = 1 << 16;

/// Grid resolution for the RsSD maximization before golden-section refinement.
const ALPHA_GRID: usize = 10_000;
const GOLDEN_TOL: f64 = 1e-9;

/// `1 / ln^2 2`, the asymptotic per-defective constant of RsSD and UTDq.
pub fn inv_ln2_squared() -> f64 {
    1.0 / (LN_2 * LN_2)
}

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Parameter(format!(
            "entropy argument {x} outside [0, 1]"
        )));
    }
    Ok(h2(x))
}

#[inline]
fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `ln C(n, k)` as a sum of logarithms of the factor ratios.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::Parameter(format!("C({n}, {k}) needs k <= n")));
    }
    let k = k.min(n - k);
    Ok((1..=k).map(|j| ((n - k + j) as f64 / j as f64).ln()).sum())
}

/// Leading-order Stirling estimate of `ln C(n, αn)`:
/// `-½ ln(2π α (1-α) n) + n H(α) ln 2`.
///
/// The estimate differs from the true value by `(αβ-1)/(12αβn)` plus a
/// third-order term, where `β = 1-α`. `αn` need not be an integer; for
/// non-integral `αn` the comparison is with the gamma-function binomial.
pub fn stirling_approx(n: u64, alpha: f64) -> Result<f64> {
    if n == 0 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!(
            "stirling_approx needs n > 0 and 0 < alpha < 1, got n = {n}, alpha = {alpha}"
        )));
    }
    let n = n as f64;
    let beta = 1.0 - alpha;
    Ok(-0.5 * (2.0 * PI * alpha * beta * n).ln() + n * h2(alpha) * LN_2)
}

fn check_d(d: u32) -> Result<()> {
    if d > MAX_D {
        return Err(Error::Capacity(format!(
            "d = {d} exceeds the limit {MAX_D}"
        )));
    }
    Ok(())
}

fn check_q(q: u32) -> Result<()> {
    if q > MAX_Q {
        return Err(Error::Capacity(format!(
            "q = {q} exceeds the limit {MAX_Q}"
        )));
    }
    Ok(())
}

/// `N_{d,i}`: strings of length `d` over an `i`-letter alphabet that use
/// every letter, by inclusion-exclusion.
pub fn surjections(d: u32, i: u32) -> Result<BigUint> {
    check_d(d)?;
    if i > d {
        return Ok(BigUint::zero());
    }
    Ok(surjection_by_inclusion_exclusion(d, i))
}

fn surjection_by_inclusion_exclusion(d: u32, i: u32) -> BigUint {
    let mut total = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=i {
        let term = &binom * BigInt::from(i - j).pow(d);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        binom = binom * (i - j) / (j + 1);
    }
    debug_assert!(!total.is_negative());
    total
        .to_biguint()
        .expect("surjection count is non-negative")
}

/// `N_{d,0..=d}` in one pass.
fn surjection_row(d: u32) -> Vec<BigUint> {
    let powers: Vec<BigInt> = (0..=d).map(|k| BigInt::from(k).pow(d)).collect();
    let mut row = Vec::with_capacity(d as usize + 1);
    for i in 0..=d {
        let mut total = BigInt::zero();
        let mut binom = BigInt::one();
        for j in 0..=i {
            let term = &binom * &powers[(i - j) as usize];
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
            binom = binom * (i - j) / (j + 1);
        }
        row.push(
            total
                .to_biguint()
                .expect("surjection count is non-negative"),
        );
    }
    row
}

fn binomial_big(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut c = BigUint::one();
    for j in 0..k {
        c = c * (n - j) / (j + 1);
    }
    c
}

/// `R_{q,d,i} = C(q,i) N_{d,i}`: strings in `[q]^d` with exactly `i` distinct symbols.
pub fn r_qdi(q: u32, d: u32, i: u32) -> Result<BigUint> {
    check_d(d)?;
    check_q(q)?;
    if i == 0 || i > q.min(d) {
        return Ok(BigUint::zero());
    }
    Ok(binomial_big(q, i) * surjection_by_inclusion_exclusion(d, i))
}

/// Natural log of a big integer, exact up to the final rounding.
fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * LN_2
}

/// Evaluates `ln P_{q,d}` for many `q` at a fixed `d`, sharing the
/// surjection counts.
struct LnPTable {
    d: u32,
    surj: Vec<BigUint>,
}

impl LnPTable {
    fn new(d: u32) -> Self {
        LnPTable {
            d,
            surj: surjection_row(d),
        }
    }

    fn ln_p(&self, q: u32) -> f64 {
        let d = self.d;
        let d_ln_q = d as f64 * (q as f64).ln();
        let mut binom = BigUint::one();
        let mut sum = 0.0;
        for i in 1..=q.min(d) {
            binom = binom * (q - i + 1) / i;
            let r = &binom * &self.surj[i as usize];
            // R / q^d in log space; R is exact.
            let weight = (ln_big(&r) - d_ln_q).exp();
            sum += weight * (i as f64 / q as f64).ln();
        }
        sum
    }
}

/// `ln P_{q,d} = q^{-d} Σ_i R_{q,d,i} ln(i/q)`.
///
/// Accepts `d > q` as well, with `i` running to `min(q, d)`.
pub fn ln_p_qd(q: u32, d: u32) -> Result<f64> {
    if q < 2 || d < 1 {
        return Err(Error::Parameter(format!(
            "ln P needs q >= 2 and d >= 1, got q = {q}, d = {d}"
        )));
    }
    check_d(d)?;
    check_q(q)?;
    Ok(LnPTable::new(d).ln_p(q))
}

/// `β = 1 - (1-α)^d`.
#[inline]
fn rssd_beta(alpha: f64, d: u32) -> f64 {
    if d == 1 {
        alpha
    } else {
        -(d as f64 * (-alpha).ln_1p()).exp_m1()
    }
}

/// `f(α) = H(α) - β H(α/β)` with `β = 1 - (1-α)^d`.
pub fn rssd_objective(alpha: f64, d: u32) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) || d == 0 {
        return Err(Error::Parameter(format!(
            "RsSD objective needs 0 < alpha <= 1 and d >= 1, got alpha = {alpha}, d = {d}"
        )));
    }
    Ok(rssd_f(alpha, d))
}

fn rssd_f(alpha: f64, d: u32) -> f64 {
    if alpha >= 1.0 {
        return 0.0;
    }
    let beta = rssd_beta(alpha, d);
    h2(alpha) - beta * h2((alpha / beta).min(1.0))
}

/// Same as [`rssd_objective`] but with `β = 1 - (1+λ)(1-α)^d`, the variant
/// used by the RsSD lower-bound sizing. Requires `α < β`.
pub(crate) fn rssd_objective_shifted(alpha: f64, d: u32, lambda: f64) -> Option<(f64, f64)> {
    let beta = 1.0 - (1.0 + lambda) * (1.0 - alpha).powi(d as i32);
    if !(beta > alpha && beta <= 1.0) {
        return None;
    }
    Some((h2(alpha) - beta * h2(alpha / beta), beta))
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    while b - a > tol {
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e);
        }
    }
    (a + b) / 2.0
}

/// Maximizes `f` over `(0, 1)`: grid search, then golden-section refinement
/// around the best grid point.
pub(crate) fn maximize_on_unit(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = 1.0 / (ALPHA_GRID + 1) as f64;
    let (best_k, _) = (1..=ALPHA_GRID).map(|k| (k, f(k as f64 * step))).fold(
        (1, f64::NEG_INFINITY),
        |acc, (k, v)| if v > acc.1 { (k, v) } else { acc },
    );
    let lo = ((best_k - 1) as f64 * step).max(step * 1e-3);
    let hi = (best_k + 1) as f64 * step;
    let x = golden_max(&f, lo, hi, GOLDEN_TOL);
    (x, f(x))
}

/// Maximizer and maximum of the RsSD objective over `α ∈ (0, 1)`.
pub fn rssd_optimal_alpha(d: u32) -> (f64, f64) {
    maximize_on_unit(|a| rssd_f(a, d))
}

/// Candidate alphabet sizes for UTDq at defect bound `d`.
pub fn utdq_q_range(d: u32) -> std::ops::RangeInclusive<u32> {
    let ln_ceil = ((d + 1) as f64).ln().ceil() as u32;
    let hi = (10 * d * ln_ceil).max(d + 8);
    d.max(2)..=hi
}

/// The alphabet size minimizing `q / (-ln P_{q,d})` over [`utdq_q_range`],
/// with the per-defective constant `q / (-d ln P_{q,d})` it achieves.
pub fn utdq_optimal_q(d: u32) -> Result<(u32, f64)> {
    if d == 0 {
        return Err(Error::Parameter("d must be at least 1".into()));
    }
    check_d(d)?;
    let range = utdq_q_range(d);
    check_q(*range.end())?;
    let table = LnPTable::new(d);
    let best = range
        .map(|q| (q, q as f64 / (-(d as f64) * table.ln_p(q))))
        .fold(
            (0, f64::INFINITY),
            |acc, cur| if cur.1 < acc.1 { cur } else { acc },
        );
    Ok(best)
}

/// Per-defective constant from the simplified transversal sizing,
/// `q / (-d ln(1 - (1-1/q)^d))`.
pub fn utdq_simplified_constant(q: u32, d: u32) -> f64 {
    let miss = (1.0 - 1.0 / q as f64).powi(d as i32);
    q as f64 / (-(d as f64) * (-miss).ln_1p())
}

/// Minimum of [`utdq_simplified_constant`] over [`utdq_q_range`].
pub fn utdq_simplified_optimum(d: u32) -> (u32, f64) {
    utdq_q_range(d)
        .map(|q| (q, utdq_simplified_constant(q, d)))
        .fold(
            (0, f64::INFINITY),
            |acc, cur| if cur.1 < acc.1 { cur } else { acc },
        )
}

/// Per-defective leading constant `c^D_M(d) / d` of `ln n`.
pub fn c_constant(model: Model, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::Parameter("d must be at least 1".into()));
    }
    Ok(match model {
        Model::Rid | Model::Rrsd => E,
        Model::Rssd => {
            let (_, f) = rssd_optimal_alpha(d);
            1.0 / (d as f64 * LN_2 * f)
        }
        Model::Utdq => utdq_optimal_q(d)?.1,
    })
}

/// Limit of the RsSD constant as `d → ∞`: `1 / (ln 2 · max_x x log2(1/(1-e^{-x})))`.
pub fn rssd_asymptotic() -> (f64, f64) {
    let g = |x: f64| -x * (-(-x).exp()).ln_1p() / LN_2;
    let x = golden_max(g, 1e-6, 10.0, 1e-12);
    (x, 1.0 / (LN_2 * g(x)))
}

/// Limit of the UTDq constant as `d → ∞`: `min_{x>1} x / (-ln(1 - e^{-1/x}))`.
pub fn utdq_asymptotic() -> (f64, f64) {
    let g = |x: f64| x / -(-(-1.0 / x).exp()).ln_1p();
    let x = golden_max(|x| -g(x), 1.0, 10.0, 1e-12);
    (x, g(x))
}

/// One row of the leading-constant table. `d = None` is the `d → ∞` row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsRow {
    pub d: Option<u32>,
    pub rid: f64,
    pub rrsd: f64,
    pub rssd: f64,
    pub rssd_alpha: Option<f64>,
    pub utdq: f64,
    pub utdq_q: Option<u32>,
}

/// Rows for `d = 2..=d_max`, then the asymptotic row.
pub fn table1(d_max: u32) -> Result<Vec<ConstantsRow>> {
    if !(2..=64).contains(&d_max) {
        return Err(Error::Capacity(format!(
            "d_max = {d_max} must lie in 2..=64"
        )));
    }
    let mut rows = Vec::with_capacity(d_max as usize);
    for d in 2..=d_max {
        let (alpha, f) = rssd_optimal_alpha(d);
        let (q, utdq) = utdq_optimal_q(d)?;
        rows.push(ConstantsRow {
            d: Some(d),
            rid: c_constant(Model::Rid, d)?,
            rrsd: c_constant(Model::Rrsd, d)?,
            rssd: 1.0 / (d as f64 * LN_2 * f),
            rssd_alpha: Some(alpha),
            utdq,
            utdq_q: Some(q),
        });
    }
    rows.push(ConstantsRow {
        d: None,
        rid: E,
        rrsd: E,
        rssd: rssd_asymptotic().1,
        rssd_alpha: None,
        utdq: utdq_asymptotic().1,
        utdq_q: None,
    });
    Ok(rows)
}

pub const TABLE1_HEADER: &str = "d,rid,rrsd,rssd,rssd_alpha,utdq,utdq_q";

/// CSV rendering with header [`TABLE1_HEADER`]; the asymptotic row is labelled `inf`.
pub fn table1_csv(rows: &[ConstantsRow]) -> String {
    let mut out = String::new();
    out.push_str(TABLE1_HEADER);
    out.push('\n');
    for r in rows {
        let d = r.d.map_or_else(|| "inf".to_string(), |d| d.to_string());
        let alpha = r.rssd_alpha.map_or_else(String::new, |a| format!("{a:.6}"));
        let q = r.utdq_q.map_or_else(String::new, |q| q.to_string());
        let _ = writeln!(
            out,
            "{d},{:.6},{:.6},{:.6},{alpha},{:.6},{q}",
            r.rid, r.rrsd, r.rssd, r.utdq
        );
    }
    out
}

/// Published leading constants for `d = 2..=10`: `(d, RsSD, UTDq)`.
pub const REFERENCE_CONSTANTS: [(u32, f64, f64); 9] = [
    (2, 1.95, 2.417),
    (3, 1.96, 2.31),
    (4, 1.992, 2.225),
    (5, 2.01, 2.221),
    (6, 2.02, 2.198),
    (7, 2.03, 2.182),
    (8, 2.04, 2.17),
    (9, 2.044, 2.16),
    (10, 2.05, 2.152),
];

/// Deviations larger than this are flagged in the comparison report.
pub const DEVIATION_FLAG: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceComparison {
    pub d: u32,
    pub rssd: f64,
    pub ref_rssd: f64,
    pub dev_rssd: f64,
    pub utdq: f64,
    pub ref_utdq: f64,
    pub dev_utdq: f64,
    /// The simplified transversal constant, for context.
    pub utdq_simplified: f64,
    pub flagged: bool,
}

/// Compares computed rows against [`REFERENCE_CONSTANTS`] where both exist.
pub fn compare_with_reference(rows: &[ConstantsRow]) -> Vec<ReferenceComparison> {
    rows.iter()
        .filter_map(|r| {
            let d = r.d?;
            let &(_, ref_rssd, ref_utdq) = REFERENCE_CONSTANTS.iter().find(|e| e.0 == d)?;
            let dev_rssd = r.rssd - ref_rssd;
            let dev_utdq = r.utdq - ref_utdq;
            Some(ReferenceComparison {
                d,
                rssd: r.rssd,
                ref_rssd,
                dev_rssd,
                utdq: r.utdq,
                ref_utdq,
                dev_utdq,
                utdq_simplified: utdq_simplified_optimum(d).1,
                flagged: dev_rssd.abs() > DEVIATION_FLAG || dev_utdq.abs() > DEVIATION_FLAG,
            })
        })
        .collect()
}

pub const COMPARISON_HEADER: &str =
    "d,rssd,ref_rssd,dev_rssd,utdq,ref_utdq,dev_utdq,utdq_simplified,flagged";

pub fn comparison_csv(cmp: &[ReferenceComparison]) -> String {
    let mut out = String::new();
    out.push_str(COMPARISON_HEADER);
    out.push('\n');
    for c in cmp {
        let _ = writeln!(
            out,
            "{},{:.6},{},{:+.6},{:.6},{},{:+.6},{:.6},{}",
            c.d,
            c.rssd,
            c.ref_rssd,
            c.dev_rssd,
            c.utdq,
            c.ref_utdq,
            c.dev_utdq,
            c.utdq_simplified,
            c.flagged
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts strings in `[q]^d` by number of distinct symbols.
    fn brute_force_r(q: u32, d: u32) -> Vec<u64> {
        let mut counts = vec![0u64; d as usize + 1];
        let total = (q as u64).pow(d);
        for code in 0..total {
            let mut seen = 0u64;
            let mut c = code;
            for _ in 0..d {
                seen |= 1 << (c % q as u64);
                c /= q as u64;
            }
            counts[seen.count_ones() as usize] += 1;
        }
        counts
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(0.5).unwrap(), 1.0);
        assert_eq!(entropy(0.0).unwrap(), 0.0);
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        let h = 0.5 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((entropy(0.25).unwrap() - h).abs() < 1e-15);
        assert!((entropy(0.25).unwrap() - 0.811278).abs() < 1e-6);
        assert!(entropy(-0.1).is_err());
        assert!(entropy(1.5).is_err());
    }

    #[test]
    fn log_binomial_values() {
        assert!((log_binomial(4, 2).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert_eq!(log_binomial(17, 0).unwrap(), 0.0);
        assert!(log_binomial(3, 4).is_err());
    }

    #[test]
    fn stirling_close_at_100() {
        let diff = log_binomial(100, 50).unwrap() - stirling_approx(100, 0.5).unwrap();
        assert!(diff.abs() <= 0.01);
        // leading correction (αβ-1)/(12αβn) = -0.0025
        assert!((diff + 0.0025).abs() < 1e-5, "{diff}");
    }

    #[test]
    fn stirling_within_correction_on_grid() {
        for n in (20..=500).step_by(20) {
            for k in 1..=9 {
                let alpha = k as f64 / 10.0;
                let kk = (alpha * n as f64).round() as u64;
                if (kk as f64 - alpha * n as f64).abs() > 1e-9 {
                    continue;
                }
                let ab = alpha * (1.0 - alpha);
                let bound = (ab - 1.0).abs() / (12.0 * ab * n as f64) + 10.0 / (n as f64).powi(3);
                let diff = log_binomial(n, kk).unwrap() - stirling_approx(n, alpha).unwrap();
                assert!(
                    diff.abs() <= bound,
                    "n={n} alpha={alpha} diff={diff} bound={bound}"
                );
            }
        }
    }

    #[test]
    fn surjection_small_values() {
        for d in 1..10 {
            assert_eq!(surjections(d, 1).unwrap(), BigUint::one());
        }
        assert_eq!(surjections(2, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(surjections(3, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(surjections(3, 5).unwrap(), BigUint::zero());
        assert!(matches!(surjections(MAX_D + 1, 1), Err(Error::Capacity(_))));
    }

    #[test]
    fn surjections_match_stirling_recurrence() {
        // N_{d,i} = i! S(d,i), S(d,i) = i S(d-1,i) + S(d-1,i-1)
        let dmax = 30u32;
        let mut s = vec![vec![BigUint::zero(); dmax as usize + 1]; dmax as usize + 1];
        s[0][0] = BigUint::one();
        for d in 1..=dmax as usize {
            for i in 1..=d {
                s[d][i] = &s[d - 1][i] * BigUint::from(i) + &s[d - 1][i - 1];
            }
        }
        for d in 1..=dmax {
            let row = surjection_row(d);
            let mut fact = BigUint::one();
            for i in 1..=d {
                fact *= i;
                let expect = &fact * &s[d as usize][i as usize];
                assert_eq!(row[i as usize], expect, "d={d} i={i}");
                assert_eq!(surjections(d, i).unwrap(), expect);
            }
        }
    }

    #[test]
    fn r_small_values() {
        assert_eq!(r_qdi(2, 2, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(r_qdi(2, 2, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(r_qdi(3, 2, 2).unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn r_partitions_strings() {
        for q in 2..=8u32 {
            for d in 1..=8u32 {
                let total: BigUint = (1..=q.min(d)).map(|i| r_qdi(q, d, i).unwrap()).sum();
                assert_eq!(total, BigUint::from(q).pow(d));
            }
        }
    }

    #[test]
    fn r_matches_enumeration() {
        for q in 2..=5u32 {
            for d in 1..=5u32 {
                let counts = brute_force_r(q, d);
                for i in 1..=d {
                    assert_eq!(r_qdi(q, d, i).unwrap(), BigUint::from(counts[i as usize]));
                }
            }
        }
    }

    #[test]
    fn ln_p_values() {
        assert!((ln_p_qd(2, 2).unwrap() + LN_2 / 2.0).abs() < 1e-12);
        for q in 2..20 {
            assert!((ln_p_qd(q, 1).unwrap() + (q as f64).ln()).abs() < 1e-14);
        }
        for q in 2..=8 {
            for d in 2..=8 {
                let lp = ln_p_qd(q, d).unwrap();
                assert!(lp > -(q as f64).ln() && lp <= 0.0, "q={q} d={d} lnP={lp}");
            }
        }
        assert!(ln_p_qd(1, 2).is_err());
        assert!(matches!(ln_p_qd(MAX_Q + 1, 2), Err(Error::Capacity(_))));
    }

    #[test]
    fn ln_p_against_direct_sum() {
        // direct float evaluation of the defining product on enumerated strings
        for q in 2..=5u32 {
            for d in 1..=5u32 {
                let counts = brute_force_r(q, d);
                let total = (q as f64).powi(d as i32);
                let direct: f64 = (1..=d as usize)
                    .map(|i| counts[i] as f64 / total * (i as f64 / q as f64).ln())
                    .sum();
                assert!((ln_p_qd(q, d).unwrap() - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rssd_objective_basics() {
        for k in 1..100 {
            let a = k as f64 / 100.0;
            assert!((rssd_objective(a, 1).unwrap() - h2(a)).abs() < 1e-12);
        }
        let (alpha, f) = rssd_optimal_alpha(1);
        assert!((alpha - 0.5).abs() < 1e-6);
        assert!((f - 1.0).abs() < 1e-12);
        assert_eq!(rssd_objective(1.0, 4).unwrap(), 0.0);
        assert!(rssd_objective(0.0, 4).is_err());
    }

    #[test]
    fn rssd_objective_nonnegative_and_unimodal() {
        for d in 1..=20u32 {
            let vals: Vec<f64> = (1..1000).map(|k| rssd_f(k as f64 / 1000.0, d)).collect();
            if d <= 10 {
                assert!(vals.iter().all(|&v| v >= -1e-15), "d={d}");
            }
            // f is flat to within rounding as α -> 1; only count resolved steps
            let slopes: Vec<bool> = vals
                .windows(2)
                .filter(|w| (w[1] - w[0]).abs() > 1e-12)
                .map(|w| w[1] > w[0])
                .collect();
            let changes = slopes.windows(2).filter(|w| w[0] != w[1]).count();
            assert_eq!(changes, 1, "d={d}");
        }
    }

    #[test]
    fn rssd_large_d_alpha_scaling() {
        let (alpha, _) = rssd_optimal_alpha(200);
        let x = alpha * 200.0;
        assert!((0.65..=0.74).contains(&x), "alpha*d = {x}");
    }

    #[test]
    fn constants_rid_and_floor() {
        for d in 1..=10 {
            assert_eq!(c_constant(Model::Rid, d).unwrap(), E);
            assert_eq!(c_constant(Model::Rrsd, d).unwrap(), E);
            for model in [Model::Rssd, Model::Utdq] {
                assert!(c_constant(model, d).unwrap() >= 1.0 / LN_2 - 1e-12);
            }
        }
    }

    #[test]
    fn asymptotic_rows() {
        let (x, c) = rssd_asymptotic();
        assert!((x - LN_2).abs() < 1e-6);
        assert!((c - inv_ln2_squared()).abs() < 1e-9);
        let (x, c) = utdq_asymptotic();
        assert!((x - 1.0 / LN_2).abs() < 1e-5);
        assert!((c - inv_ln2_squared()).abs() < 1e-9);
    }

    #[test]
    fn utdq_optimum_small_d() {
        // d = 1: minimize q / ln q over integers -> q = 3
        assert_eq!(utdq_optimal_q(1).unwrap().0, 3);
        assert_eq!(utdq_q_range(1), 2..=10);
        assert_eq!(utdq_q_range(3), 3..=60);
    }

    #[test]
    fn table_shape_and_csv() {
        let rows = table1(3).unwrap();
        assert_eq!(rows.len(), 3);
        let csv = table1_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TABLE1_HEADER);
        assert!(lines[1].starts_with("2,2.718282,2.718282,"));
        assert!(lines[3].starts_with("inf,2.718282,2.718282,2.081369,,2.081369,"));
        assert!(table1(1).is_err());
        assert!(table1(65).is_err());
        let cmp = compare_with_reference(&rows);
        assert_eq!(cmp.len(), 2);
        assert!(cmp.iter().all(|c| !c.flagged));
    }
}
