//! Test counts from the upper- and lower-bound sizing equations.
//!
//! Real-valued test counts are rounded up; UTDq counts are rounded up to a
//! multiple of `q`. Equations that are implicit in `√m` are solved exactly
//! as quadratics in `t = √m`.

use std::f64::consts::{E, LN_2};

use serde::Serialize;

use super::{optimal_param, rid_optimal_p, to_u32, DesignParam, Model};
use crate::error::{Error, Result};
use crate::theory;

/// Fixed-point iteration cap for RsSD upper sizing.
const MAX_ITERATIONS: usize = 100;

/// λ used by the RsSD lower-bound sizing (the bound holds for any λ < 1/10).
pub const RSSD_LOWER_LAMBDA: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SizingMethod {
    /// RID/RrSD upper bound: `m - √(2em ln(2/δ)) = ed ln(2n/δ)`.
    RidUpper,
    /// RsSD upper bound: `m = (1+λ)m'` by fixed-point iteration.
    RssdUpper,
    /// Simplified transversal bound `m = q ln(n/δ) / -ln(1-(1-1/q)^d)`.
    TransversalSimplified,
    /// Exact transversal bound `m = q ln(2n/δ) / ((1-λ)(-ln P_{q,d}))`.
    TransversalExact,
    RidLower,
    RrsdLower,
    RssdLower,
    TransversalLower,
    /// Test count given explicitly.
    Manual,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizingResult {
    pub model: Model,
    pub n: usize,
    pub d: usize,
    pub delta: Option<f64>,
    /// Test count: real solution rounded up (to a multiple of q for UTDq).
    pub m: usize,
    /// Unrounded solution of the sizing equation.
    pub m_real: f64,
    pub param: DesignParam,
    pub lambda: Option<f64>,
    pub feasible: bool,
    pub method: SizingMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SizingResult {
    fn infeasible(mut self, reason: impl Into<String>) -> Self {
        self.feasible = false;
        self.reason = Some(reason.into());
        self
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SizingOptions {
    /// Alphabet size for UTDq; the optimal `q` when absent.
    pub q: Option<u32>,
    /// Use the exact transversal sizing instead of the simplified one.
    pub exact_utdq: bool,
}

fn check_common(n: usize, d: usize) -> Result<()> {
    if d == 0 || n <= d {
        return Err(Error::Parameter(format!(
            "sizing needs n > d >= 1, got n = {n}, d = {d}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "delta = {delta} must lie in (0, 1)"
        )))
    }
}

/// Positive root `t` of `t² - bt - c = 0`.
fn root_minus(b: f64, c: f64) -> f64 {
    (b + (b * b + 4.0 * c).sqrt()) / 2.0
}

/// Non-negative root `t` of `t² + bt - c = 0` (zero when `c <= 0`).
fn root_plus(b: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    // 2c / (b + √(b²+4c)) avoids cancellation when b² >> c
    2.0 * c / (b + (b * b + 4.0 * c).sqrt())
}

fn ceil_to_multiple(x: f64, q: usize) -> usize {
    (x / q as f64).ceil() as usize * q
}

fn ceil_m(x: f64) -> usize {
    x.max(0.0).ceil() as usize
}

/// Upper-bound sizing with the model's optimal parameter.
pub fn upper_bound_m(model: Model, n: usize, d: usize, delta: f64) -> Result<SizingResult> {
    upper_bound_m_with(model, n, d, delta, &SizingOptions::default())
}

/// Test count at which the design is `(n, I)`-disjunct with probability at
/// least `1 - delta` for every `|I| <= d`.
pub fn upper_bound_m_with(
    model: Model,
    n: usize,
    d: usize,
    delta: f64,
    opts: &SizingOptions,
) -> Result<SizingResult> {
    check_common(n, d)?;
    check_delta(delta)?;
    let (nf, df) = (n as f64, d as f64);
    match model {
        Model::Rid | Model::Rrsd => {
            let b = (2.0 * E * (2.0 / delta).ln()).sqrt();
            let c = E * df * (2.0 * nf / delta).ln();
            let t = root_minus(b, c);
            let m_real = t * t;
            let param = match model {
                Model::Rid => DesignParam::P(rid_optimal_p(d)),
                _ => optimal_param(Model::Rrsd, n, d, None)?,
            };
            Ok(SizingResult {
                model,
                n,
                d,
                delta: Some(delta),
                m: ceil_m(m_real),
                m_real,
                param,
                lambda: None,
                feasible: true,
                method: SizingMethod::RidUpper,
                reason: None,
            })
        }
        Model::Rssd => Ok(rssd_upper(n, d, delta)?),
        Model::Utdq => {
            let q = match opts.q {
                Some(q) if q >= 2 => q,
                Some(q) => return Err(Error::Parameter(format!("q = {q} must be at least 2"))),
                None => theory::utdq_optimal_q(to_u32(d)?)?.0,
            };
            if opts.exact_utdq {
                utdq_exact_upper(n, d, delta, q)
            } else {
                let miss = (1.0 - 1.0 / q as f64).powi(d as i32);
                let m_real = q as f64 * (nf / delta).ln() / -(-miss).ln_1p();
                Ok(SizingResult {
                    model,
                    n,
                    d,
                    delta: Some(delta),
                    m: ceil_to_multiple(m_real, q as usize),
                    m_real,
                    param: DesignParam::Q(q),
                    lambda: None,
                    feasible: true,
                    method: SizingMethod::TransversalSimplified,
                    reason: None,
                })
            }
        }
    }
}

fn rssd_upper(n: usize, d: usize, delta: f64) -> Result<SizingResult> {
    let (alpha, f) = theory::rssd_optimal_alpha(to_u32(d)?);
    let mut result = SizingResult {
        model: Model::Rssd,
        n,
        d,
        delta: Some(delta),
        m: 0,
        m_real: f64::NAN,
        param: DesignParam::S(0),
        lambda: None,
        feasible: true,
        method: SizingMethod::RssdUpper,
        reason: None,
    };
    let beta = 1.0 - (1.0 - alpha).powi(d as i32);
    if d == 1 || beta <= alpha {
        return Ok(result.infeasible("correction term ln(β(1-α)/(β-α)) is undefined for d = 1"));
    }
    let correction = 0.5 * (beta * (1.0 - alpha) / (beta - alpha)).ln();
    let m_prime = ((n as f64).ln() + (3.0 / delta).ln() + correction) / (LN_2 * f);
    let good = (1.0 - alpha).powi(d as i32);
    let lambda_at = |m: f64| 2.0 / (delta * good * m).sqrt();

    let mut m = m_prime;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let next = (1.0 + lambda_at(m)) * m_prime;
        let step = (next - m).abs();
        m = next;
        if step < 0.5 {
            converged = true;
            break;
        }
    }
    let lambda = lambda_at(m);
    let m_int = ceil_m(m);
    let s = ((alpha * m_int as f64).round() as usize).min(m_int);
    result.m = m_int;
    result.m_real = m;
    result.param = DesignParam::S(s);
    result.lambda = Some(lambda);
    Ok(if !converged {
        result.infeasible(format!(
            "fixed point did not converge in {MAX_ITERATIONS} iterations"
        ))
    } else if lambda >= 1.0 {
        result.infeasible(format!("λ = {lambda:.4} >= 1 at m = {m:.1}"))
    } else {
        result
    })
}

/// `λ = √(K/m)`, the Chernoff deviation in the transversal bounds, with
/// `K = c · q^{d+1} · ln(k · q^d / δ')` computed in log space.
fn transversal_k(q: u32, d: usize, c: f64, log_arg: f64) -> f64 {
    let ln_q = (q as f64).ln();
    let ln_term = log_arg.ln() + d as f64 * ln_q;
    c * ((d + 1) as f64 * ln_q).exp() * ln_term
}

fn utdq_exact_upper(n: usize, d: usize, delta: f64, q: u32) -> Result<SizingResult> {
    let ln_p = theory::ln_p_qd(q, to_u32(d)?)?;
    let a = q as f64 * (2.0 * n as f64 / delta).ln() / -ln_p;
    // m (1 - √(K/m)) = a  <=>  t² - √K t - a = 0
    let k = transversal_k(q, d, 2.0, 2.0 / delta);
    let t = root_minus(k.sqrt(), a);
    let m_real = t * t;
    let lambda = k.sqrt() / t;
    let result = SizingResult {
        model: Model::Utdq,
        n,
        d,
        delta: Some(delta),
        m: if m_real.is_finite() {
            ceil_to_multiple(m_real, q as usize)
        } else {
            usize::MAX
        },
        m_real,
        param: DesignParam::Q(q),
        lambda: Some(lambda),
        feasible: true,
        method: SizingMethod::TransversalExact,
        reason: None,
    };
    Ok(if !m_real.is_finite() {
        result.infeasible("test count overflows")
    } else if lambda >= 1.0 {
        result.infeasible(format!("λ = {lambda:.4} >= 1"))
    } else {
        result
    })
}

/// Reference test count below which the design fails with constant
/// probability (at least 1/3; 3λ/16 for RsSD; 3/4 for UTDq).
pub fn lower_bound_m(model: Model, n: usize, d: usize) -> Result<SizingResult> {
    check_common(n, d)?;
    let (nf, df) = (n as f64, d as f64);
    let correction_b = E.powi(3) * 3f64.sqrt();
    match model {
        Model::Rid | Model::Rrsd => {
            let ln_term = if model == Model::Rid {
                nf.ln()
            } else {
                nf.ln() - 1.0
            };
            let t = root_plus(correction_b, E * df * ln_term);
            let m_real = t * t;
            let param = match model {
                Model::Rid => DesignParam::P(rid_optimal_p(d)),
                _ => optimal_param(Model::Rrsd, n, d, None)?,
            };
            let result = SizingResult {
                model,
                n,
                d,
                delta: None,
                m: ceil_m(m_real),
                m_real,
                param,
                lambda: None,
                feasible: true,
                method: if model == Model::Rid {
                    SizingMethod::RidLower
                } else {
                    SizingMethod::RrsdLower
                },
                reason: None,
            };
            if model == Model::Rrsd {
                let limit = nf.sqrt() / nf.ln().powi(3);
                if df >= limit {
                    return Ok(result.infeasible(format!(
                        "precondition d < √n / ln³n fails: d = {d}, √n / ln³n = {limit:.4}"
                    )));
                }
            }
            Ok(result)
        }
        Model::Rssd => {
            let dd = to_u32(d)?;
            let lambda = RSSD_LOWER_LAMBDA;
            let objective = |a: f64| {
                theory::rssd_objective_shifted(a, dd, lambda).map_or(f64::NEG_INFINITY, |(f, _)| f)
            };
            let (alpha, f) = theory::maximize_on_unit(objective);
            let mut result = SizingResult {
                model,
                n,
                d,
                delta: None,
                m: 0,
                m_real: f64::NAN,
                param: DesignParam::S(0),
                lambda: Some(lambda),
                feasible: true,
                method: SizingMethod::RssdLower,
                reason: None,
            };
            let Some((_, beta)) =
                theory::rssd_objective_shifted(alpha, dd, lambda).filter(|_| f > 0.0)
            else {
                return Ok(
                    result.infeasible(format!("no α with β = 1 - (1+λ)(1-α)^d > α at d = {d}"))
                );
            };
            let correction = 0.5 * (beta * (1.0 - alpha) / (beta - alpha)).ln();
            let m_real = (nf.ln() + LN_2 + correction) / (f * LN_2);
            result.m = ceil_m(m_real);
            result.m_real = m_real;
            result.param =
                DesignParam::S(((alpha * result.m as f64).round() as usize).min(result.m));
            Ok(result)
        }
        Model::Utdq => {
            let (q, _) = theory::utdq_optimal_q(to_u32(d)?)?;
            let ln_p = theory::ln_p_qd(q, to_u32(d)?)?;
            let a = q as f64 * (8.0 * (nf - df)).ln() / -ln_p;
            // m (1 + √(K/m)) = a  <=>  t² + √K t - a = 0
            let k = transversal_k(q, d, 3.0, 16.0);
            let t = root_plus(k.sqrt(), a);
            let m_real = t * t;
            let lambda = if t > 0.0 { k.sqrt() / t } else { f64::INFINITY };
            let result = SizingResult {
                model,
                n,
                d,
                delta: None,
                m: ceil_to_multiple(m_real, q as usize),
                m_real,
                param: DesignParam::Q(q),
                lambda: Some(lambda),
                feasible: true,
                method: SizingMethod::TransversalLower,
                reason: None,
            };
            Ok(if lambda >= 1.0 {
                result.infeasible(format!(
                    "λ = {lambda:.4} >= 1; the Chernoff step needs λ < 1"
                ))
            } else {
                result
            })
        }
    }
}
